#include <algorithm>
#include <cmath>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "liposim/trace.hpp"
#include "structure.hpp"

namespace liposim {

namespace detail {

namespace {

// Parent of the compartment `id` inside `root`, with the child's index.
Compartment* find_parent(Compartment& root, std::string_view id, std::size_t& index) {
  for (std::size_t i = 0; i < root.children.size(); ++i) {
    if (root.children[i].id == id) {
      index = i;
      return &root;
    }
    if (Compartment* p = find_parent(root.children[i], id, index)) return p;
  }
  return nullptr;
}

}  // namespace

void refresh_morphology(Mvl& mvl) {
  if (mvl.lysed()) return;
  const int height = tree_height(mvl.root);
  if (height == 1) {
    mvl.morphology = Morphology::Plain;
  } else if (mvl.morphology != Morphology::T2 && mvl.morphology != Morphology::T3) {
    mvl.morphology = morphology_for_height(height);
  }
}

Event liberate_root(SystemState& state, std::size_t index, EventKind kind) {
  Compartment& root = state.mvls[index].root;
  Event event{state.clock, kind, root.id, 1, root.contents, {}};
  state.environment.receive(root.contents);
  state.environment.gas_accumulated += root.gas_accumulated;

  std::vector<Mvl> freed;
  freed.reserve(root.children.size());
  for (auto& child : root.children) {
    shift_depth(child, -1);
    Mvl m;
    m.root = std::move(child);
    m.morphology = morphology_for_height(tree_height(m.root));
    m.environment_id = state.mvls[index].environment_id;
    freed.push_back(std::move(m));
  }
  if (!freed.empty()) event.note = "freed " + std::to_string(freed.size());

  root.children.clear();
  root.contents.clear();
  root.gas_accumulated = 0.0;
  root.membrane_intact = false;
  root.channels.clear();
  root.permeability_boost = 1.0;
  root.boost_until.reset();

  const auto at = state.mvls.begin() + static_cast<std::ptrdiff_t>(index) + 1;
  state.mvls.insert(at, std::make_move_iterator(freed.begin()), std::make_move_iterator(freed.end()));
  return event;
}

bool burst_inner(SystemState& state, std::string_view id, Event& event) {
  for (auto& mvl : state.mvls) {
    if (mvl.lysed()) continue;
    std::size_t i = 0;
    Compartment* parent = find_parent(mvl.root, id, i);
    if (!parent) continue;
    if (!parent->children[i].membrane_intact) return false;
    Compartment inner = std::move(parent->children[i]);
    event = Event{state.clock, EventKind::Burst, inner.id, inner.depth, inner.contents, {}};
    parent->contents.add(inner.contents);
    parent->gas_accumulated += inner.gas_accumulated;
    auto pos = parent->children.erase(parent->children.begin() + static_cast<std::ptrdiff_t>(i));
    for (auto& child : inner.children) shift_depth(child, -1);
    parent->children.insert(pos, std::make_move_iterator(inner.children.begin()),
                            std::make_move_iterator(inner.children.end()));
    refresh_morphology(mvl);
    return true;
  }
  return false;
}

}  // namespace detail

namespace engine {

namespace {

std::size_t mvl_index(const SystemState& state, std::string_view id) {
  for (std::size_t m = 0; m < state.mvls.size(); ++m) {
    if (state.mvls[m].id() == id) return m;
  }
  throw UnknownIdError("unknown MVL '" + std::string(id) + "'");
}

void check_species(const SystemState& state, SpeciesId species) {
  if (species.index >= state.species.size()) {
    throw UnknownIdError("unknown species index " + std::to_string(species.index));
  }
}

}  // namespace

std::vector<Event> dc_pulse(SystemState& state, std::span<const std::string> targets) {
  for (const auto& t : targets) mvl_index(state, t);
  std::vector<Event> events;
  for (const auto& t : targets) {
    const std::size_t m = mvl_index(state, t);
    if (state.mvls[m].lysed()) {
      events.push_back(Event{state.clock, EventKind::DcLysis, t, 1, {}, "already lysed"});
      continue;
    }
    events.push_back(detail::liberate_root(state, m, EventKind::DcLysis));
  }
  return events;
}

Event electroporate(SystemState& state, std::string_view mvl_id, double duration, double boost) {
  if (state.mode != Mode::Kinetic) throw ModeError("electroporation needs a kinetic-mode system");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("electroporation duration must be > 0");
  if (!(boost >= 1.0) || !std::isfinite(boost)) throw InvalidArgument("electroporation boost must be >= 1");
  Mvl& mvl = state.mvls[mvl_index(state, mvl_id)];
  if (mvl.lysed()) throw LysedError("MVL '" + std::string(mvl_id) + "' is lysed");
  mvl.root.permeability_boost = boost;
  mvl.root.boost_until = state.clock + duration;
  return Event{state.clock, EventKind::ElectroporationOpen, mvl.id(), 1, {},
               "boost=" + format_number(boost) + " until=" + format_number(*mvl.root.boost_until)};
}

std::vector<Event> expire_electroporation(SystemState& state) {
  std::vector<Event> events;
  for (auto& mvl : state.mvls) {
    Compartment& root = mvl.root;
    if (!root.boost_until || state.clock < *root.boost_until) continue;
    root.boost_until.reset();
    root.permeability_boost = 1.0;
    events.push_back(Event{state.clock, EventKind::ElectroporationClose, root.id, 1, {}, {}});
  }
  return events;
}

Event microinject(SystemState& state, std::string_view compartment_id, SpeciesId species, double amount) {
  check_species(state, species);
  if (!(amount >= 0.0) || !std::isfinite(amount)) throw InvalidArgument("injected amount must be >= 0");
  if (state.mode == Mode::Abstract && amount != std::floor(amount)) {
    throw InvalidArgument("abstract-mode injection must be a whole number of objects");
  }
  Mixture payload;
  payload.set(species, amount);
  if (compartment_id == Environment::kId) {
    if (state.environment.unbounded) throw InvalidArgument("cannot inject into an unbounded environment");
    state.environment.contents.add(species, amount);
    return Event{state.clock, EventKind::Injection, std::string(compartment_id), 0, payload, {}};
  }
  Compartment* c = state.find_compartment(compartment_id);
  if (!c) throw UnknownIdError("unknown compartment '" + std::string(compartment_id) + "'");
  if (!c->membrane_intact) throw LysedError("compartment '" + std::string(compartment_id) + "' is lysed");
  c->contents.add(species, amount);
  return Event{state.clock, EventKind::Injection, c->id, c->depth, payload, {}};
}

void insert_channel(SystemState& state, std::string_view compartment_id, SpeciesId species,
                    double permeability) {
  check_species(state, species);
  if (!(permeability >= 0.0) || !std::isfinite(permeability)) {
    throw InvalidArgument("channel permeability must be >= 0");
  }
  Compartment* c = state.find_compartment(compartment_id);
  if (!c) throw UnknownIdError("unknown compartment '" + std::string(compartment_id) + "'");
  if (!c->membrane_intact) throw LysedError("compartment '" + std::string(compartment_id) + "' is lysed");
  c->channels[species] = permeability;
}

std::vector<Event> apply_intervention(SystemState& state, const ScheduledIntervention& intervention) {
  return std::visit(
      [&](const auto& op) -> std::vector<Event> {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, DcPulseOp>) {
          return dc_pulse(state, op.targets);
        } else if constexpr (std::is_same_v<T, ElectroporateOp>) {
          return {electroporate(state, op.mvl_id, op.duration, op.boost)};
        } else if constexpr (std::is_same_v<T, InjectOp>) {
          return {microinject(state, op.compartment_id, op.species, op.amount)};
        } else {
          insert_channel(state, op.compartment_id, op.species, op.permeability);
          return {};
        }
      },
      intervention.op);
}

}  // namespace engine

}  // namespace liposim
