#include "liposim/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "liposim/error.hpp"
#include "liposim/geometry.hpp"

namespace liposim {

namespace {

constexpr std::array<std::string_view, 2> kModeNames{"abstract", "kinetic"};
constexpr std::array<std::string_view, kPermClassCount> kPermClassNames{
    "gas", "small_polar", "lipophilic", "ionic", "macromolecule", "particle"};
constexpr std::array<std::string_view, 5> kMorphologyNames{"T1a", "T1b", "T2", "T3", "plain"};
constexpr std::array<std::string_view, 3> kTargetNames{"here", "out", "in"};
constexpr std::array<std::string_view, 6> kEventNames{
    "burst", "dc_lysis", "electroporation_open", "electroporation_close", "halt", "injection"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<E>(i);
  }
  return std::nullopt;
}

// Relative slack for the packing and volume checks; volumes are computed
// from diameters in floating point.
constexpr double kVolumeTolerance = 1e-9;

void validate_node(const Compartment& c, int expected_depth) {
  if (c.depth != expected_depth) {
    throw InvariantError("compartment '" + c.id + "' has depth " + std::to_string(c.depth) +
                         ", expected " + std::to_string(expected_depth));
  }
  if (c.depth > kMaxDepth) {
    throw InvariantError("compartment '" + c.id + "' exceeds the maximum nesting depth of " +
                         std::to_string(kMaxDepth));
  }
  if (!(c.diameter > 0.0)) {
    throw InvariantError("compartment '" + c.id + "' has nonpositive diameter");
  }
  const double expected = sphere_volume(c.diameter);
  if (std::abs(c.volume - expected) > kVolumeTolerance * expected) {
    throw InvariantError("compartment '" + c.id + "' volume does not match its diameter");
  }
  if (!(c.gas_accumulated >= 0.0)) {
    throw InvariantError("compartment '" + c.id + "' has negative accumulated gas");
  }
  double packed = 0.0;
  for (const auto& child : c.children) packed += child.volume;
  if (packed > c.volume * (1.0 + kVolumeTolerance)) {
    throw InvariantError("children of compartment '" + c.id + "' occupy " + std::to_string(packed) +
                         " fL, more than its volume of " + std::to_string(c.volume) + " fL");
  }
  for (const auto& [species, p] : c.channels) {
    if (!(p >= 0.0)) throw InvariantError("negative channel permeability on '" + c.id + "'");
  }
  if (!(c.permeability_boost >= 1.0)) {
    throw InvariantError("permeability boost below 1 on '" + c.id + "'");
  }
  for (const auto& child : c.children) validate_node(child, expected_depth + 1);
}

}  // namespace

std::string_view to_string(Mode mode) { return kModeNames[static_cast<std::size_t>(mode)]; }
std::string_view to_string(PermClass cls) { return kPermClassNames[static_cast<std::size_t>(cls)]; }
std::string_view to_string(Morphology m) { return kMorphologyNames[static_cast<std::size_t>(m)]; }
std::string_view to_string(Target t) { return kTargetNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(EventKind k) { return kEventNames[static_cast<std::size_t>(k)]; }

std::optional<Mode> parse_mode(std::string_view text) { return lookup<Mode>(kModeNames, text); }
std::optional<PermClass> parse_perm_class(std::string_view text) {
  return lookup<PermClass>(kPermClassNames, text);
}
std::optional<Morphology> parse_morphology(std::string_view text) {
  return lookup<Morphology>(kMorphologyNames, text);
}
std::optional<Target> parse_target(std::string_view text) { return lookup<Target>(kTargetNames, text); }
std::optional<EventKind> parse_event_kind(std::string_view text) {
  return lookup<EventKind>(kEventNames, text);
}

// --- SpeciesTable ----------------------------------------------------------

SpeciesId SpeciesTable::add(Species species) {
  if (species.name.empty()) throw InvalidArgument("species name must not be empty");
  if (find(species.name)) throw InvalidArgument("duplicate species '" + species.name + "'");
  if (species.permeability_override &&
      (!(*species.permeability_override >= 0.0) || !std::isfinite(*species.permeability_override))) {
    throw InvalidArgument("species '" + species.name + "' has a negative permeability override");
  }
  species_.push_back(std::move(species));
  return SpeciesId{static_cast<std::uint32_t>(species_.size() - 1)};
}

std::optional<SpeciesId> SpeciesTable::find(std::string_view name) const {
  for (std::uint32_t i = 0; i < species_.size(); ++i) {
    if (species_[i].name == name) return SpeciesId{i};
  }
  return std::nullopt;
}

SpeciesId SpeciesTable::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw UnknownIdError("unknown species '" + std::string(name) + "'");
}

// --- Mixture ---------------------------------------------------------------

void Mixture::set(SpeciesId id, double amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) {
    throw InvalidArgument("mixture amounts must be finite and >= 0");
  }
  if (id.index >= amounts_.size()) {
    if (amount == 0.0) return;
    amounts_.resize(id.index + 1, 0.0);
  }
  amounts_[id.index] = amount;
}

void Mixture::add(SpeciesId id, double delta) { set(id, (*this)[id] + delta); }

void Mixture::add(const Mixture& other) {
  other.for_each_nonzero([&](SpeciesId id, double amount) { add(id, amount); });
}

bool Mixture::empty() const {
  return std::all_of(amounts_.begin(), amounts_.end(), [](double a) { return a == 0.0; });
}

bool Mixture::is_integral() const {
  return std::all_of(amounts_.begin(), amounts_.end(), [](double a) { return a == std::floor(a); });
}

bool Mixture::operator==(const Mixture& other) const {
  const std::size_t n = std::max(amounts_.size(), other.amounts_.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    if ((*this)[SpeciesId{i}] != other[SpeciesId{i}]) return false;
  }
  return true;
}

// --- Compartment tree ------------------------------------------------------

Compartment Compartment::sphere(std::string id, int depth, double diameter_um) {
  Compartment c;
  c.volume = sphere_volume(diameter_um);
  c.id = std::move(id);
  c.depth = depth;
  c.diameter = diameter_um;
  return c;
}

int tree_height(const Compartment& root) {
  int h = 0;
  for (const auto& child : root.children) h = std::max(h, tree_height(child));
  return h + 1;
}

void validate_tree(const Compartment& root, int expected_depth) { validate_node(root, expected_depth); }

Compartment* find_compartment(Compartment& root, std::string_view id) {
  if (root.id == id) return &root;
  for (auto& child : root.children) {
    if (auto* found = find_compartment(child, id)) return found;
  }
  return nullptr;
}

const Compartment* find_compartment(const Compartment& root, std::string_view id) {
  return find_compartment(const_cast<Compartment&>(root), id);
}

void for_each_compartment(const Compartment& root, const std::function<void(const Compartment&)>& f) {
  f(root);
  for (const auto& child : root.children) for_each_compartment(child, f);
}

void for_each_compartment(Compartment& root, const std::function<void(Compartment&)>& f) {
  f(root);
  for (auto& child : root.children) for_each_compartment(child, f);
}

void shift_depth(Compartment& root, int delta) {
  for_each_compartment(root, [delta](Compartment& c) { c.depth += delta; });
}

Morphology morphology_for_height(int height) {
  switch (height) {
    case 1:
      return Morphology::Plain;
    case 2:
      return Morphology::T1a;
    default:
      return Morphology::T1b;
  }
}

void Mvl::validate() const {
  if (root.depth != 1) throw InvariantError("MVL root '" + root.id + "' must have depth 1");
  if (lysed()) {
    if (!root.children.empty()) throw InvariantError("lysed MVL '" + root.id + "' still holds children");
    return;
  }
  validate_tree(root, 1);
  const int height = tree_height(root);
  bool ok = false;
  switch (morphology) {
    case Morphology::T1a:
    case Morphology::T2:
    case Morphology::T3:
      ok = height == 2;
      break;
    case Morphology::T1b:
      ok = height == 3;
      break;
    case Morphology::Plain:
      ok = height == 1;
      break;
  }
  if (!ok) {
    throw InvariantError("MVL '" + root.id + "' of type " + std::string(to_string(morphology)) +
                         " has nesting depth " + std::to_string(height));
  }
}

// --- Environment -----------------------------------------------------------

void Environment::receive(SpeciesId id, double amount) {
  if (amount == 0.0) return;
  if (unbounded) {
    if (id.index >= exchanged.size()) exchanged.resize(id.index + 1, 0.0);
    exchanged[id.index] += amount;
  } else {
    contents.set(id, std::max(0.0, contents[id] + amount));
  }
}

void Environment::receive(const Mixture& m) {
  m.for_each_nonzero([&](SpeciesId id, double amount) { receive(id, amount); });
}

// --- Rules -----------------------------------------------------------------

bool Rule::has_in_target() const {
  return std::any_of(products.begin(), products.end(),
                     [](const Product& p) { return p.target == Target::In; });
}

Mixture Rule::requirement() const {
  Mixture m;
  for (const auto& t : reactants) m.add(t.species, t.count);
  for (const auto& t : catalysts) m.add(t.species, t.count);
  return m;
}

void validate_rule(const Rule& rule, const SpeciesTable& species, Mode mode) {
  const auto check = [&](SpeciesId id, std::uint32_t count) {
    if (id.index >= species.size()) {
      throw InvalidArgument("rule '" + rule.name + "' references an unknown species");
    }
    if (count == 0) throw InvalidArgument("rule '" + rule.name + "' has a zero stoichiometry");
  };
  for (const auto& t : rule.reactants) check(t.species, t.count);
  for (const auto& t : rule.catalysts) check(t.species, t.count);
  for (const auto& p : rule.products) check(p.species, p.count);

  if (mode == Mode::Abstract) {
    if (!std::holds_alternative<AbstractLaw>(rule.kinetics)) {
      throw InvalidArgument("rule '" + rule.name + "' has a rate law but the system is abstract");
    }
    // Without a consumed reactant a maximally parallel step never ends.
    if (rule.reactants.empty()) throw InvalidArgument("abstract rule '" + rule.name + "' consumes nothing");
    return;
  }
  if (std::holds_alternative<AbstractLaw>(rule.kinetics)) {
    throw InvalidArgument("rule '" + rule.name + "' needs a rate law in kinetic mode");
  }
  if (const auto* ma = std::get_if<MassActionLaw>(&rule.kinetics)) {
    if (!(ma->k >= 0.0) || !std::isfinite(ma->k)) {
      throw InvalidArgument("rule '" + rule.name + "' has a negative rate constant");
    }
  }
  if (const auto* mm = std::get_if<MichaelisMentenLaw>(&rule.kinetics)) {
    if (rule.reactants.size() != 1) {
      throw InvalidArgument("Michaelis-Menten rule '" + rule.name + "' must have exactly one substrate");
    }
    if (!(mm->kcat >= 0.0) || !(mm->km > 0.0) || !std::isfinite(mm->kcat) || !std::isfinite(mm->km)) {
      throw InvalidArgument("rule '" + rule.name + "' needs kcat >= 0 and km > 0");
    }
    check(mm->enzyme, 1);
    const bool enzyme_is_catalyst = std::any_of(rule.catalysts.begin(), rule.catalysts.end(),
                                                [&](const Term& t) { return t.species == mm->enzyme; });
    if (!enzyme_is_catalyst) {
      throw InvalidArgument("enzyme of rule '" + rule.name + "' must be listed as a catalyst");
    }
  }
}

bool event_before(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.compartment_id < b.compartment_id;
}

// --- SystemState -----------------------------------------------------------

Mvl* SystemState::find_mvl(std::string_view id) {
  for (auto& m : mvls) {
    if (m.id() == id) return &m;
  }
  return nullptr;
}

const Mvl* SystemState::find_mvl(std::string_view id) const {
  return const_cast<SystemState*>(this)->find_mvl(id);
}

Compartment* SystemState::find_compartment(std::string_view id) {
  for (auto& m : mvls) {
    if (auto* c = liposim::find_compartment(m.root, id)) return c;
  }
  return nullptr;
}

const Compartment* SystemState::find_compartment(std::string_view id) const {
  return const_cast<SystemState*>(this)->find_compartment(id);
}

void SystemState::validate() const {
  for (const auto& s : species.all()) {
    if (s.permeability_override && !(*s.permeability_override >= 0.0)) {
      throw InvariantError("species '" + s.name + "' has a negative permeability override");
    }
  }
  const auto check_mixture = [&](const Mixture& m, const std::string& where) {
    if (m.extent() > species.size()) {
      bool stray = false;
      m.for_each_nonzero([&](SpeciesId id, double) { stray |= id.index >= species.size(); });
      if (stray) throw InvariantError(where + " holds an undeclared species");
    }
    if (mode == Mode::Abstract && !m.is_integral()) {
      throw InvariantError(where + " holds fractional amounts in abstract mode");
    }
  };
  check_mixture(environment.contents, "environment");
  if (!(environment.volume > 0.0)) throw InvariantError("environment volume must be positive");

  std::set<std::string, std::less<>> ids{std::string(Environment::kId)};
  for (const auto& mvl : mvls) {
    mvl.validate();
    for_each_compartment(mvl.root, [&](const Compartment& c) {
      if (!ids.insert(c.id).second) throw InvariantError("duplicate compartment id '" + c.id + "'");
      check_mixture(c.contents, "compartment '" + c.id + "'");
      for (const auto& [sp, p] : c.channels) {
        if (sp.index >= species.size()) throw InvariantError("channel for undeclared species on '" + c.id + "'");
      }
    });
  }
  for (const auto& rule : rules) {
    try {
      validate_rule(rule, species, mode);
    } catch (const InvalidArgument& e) {
      throw InvariantError(e.what());
    }
  }
}

double total_amount(const SystemState& state, SpeciesId id) {
  double total = state.environment.unbounded ? state.environment.exchanged_amount(id)
                                             : state.environment.contents[id];
  for (const auto& mvl : state.mvls) {
    for_each_compartment(mvl.root, [&](const Compartment& c) { total += c.contents[id]; });
  }
  return total;
}

int max_depth(const SystemState& state) {
  int depth = 0;
  for (const auto& mvl : state.mvls) {
    for_each_compartment(mvl.root, [&](const Compartment& c) { depth = std::max(depth, c.depth); });
  }
  return depth;
}

}  // namespace liposim
