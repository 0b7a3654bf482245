#include <algorithm>
#include <cmath>
#include <tuple>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "liposim/geometry.hpp"
#include "regions.hpp"
#include "structure.hpp"

namespace liposim::engine {

namespace {

constexpr std::size_t kMaxLoggedMessages = 16;

double rate_of(const Rule& rule, const detail::RegionView& regions, std::size_t r, double gas_factor) {
  const auto conc = [&](SpeciesId id) { return regions.concentration(r, id, gas_factor); };
  if (const auto* mm = std::get_if<MichaelisMentenLaw>(&rule.kinetics)) {
    const double s = conc(rule.reactants.front().species);
    const double e = conc(mm->enzyme);
    return mm->kcat * e * s / (mm->km + s);
  }
  if (const auto* ma = std::get_if<MassActionLaw>(&rule.kinetics)) {
    double v = ma->k;
    for (const auto& t : rule.reactants) v *= std::pow(conc(t.species), t.count);
    for (const auto& t : rule.catalysts) v *= std::pow(conc(t.species), t.count);
    return v;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(DiffusionSolver solver) {
  return solver == DiffusionSolver::ForwardEuler ? "euler" : "pairwise";
}

std::optional<DiffusionSolver> parse_diffusion_solver(std::string_view text) {
  if (text == "euler") return DiffusionSolver::ForwardEuler;
  if (text == "pairwise") return DiffusionSolver::AnalyticPairwise;
  return std::nullopt;
}

void KineticConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (!(burst_volume_ratio > 1.0)) throw InvalidArgument("burst volume ratio must be > 1");
  if (!(gas_molar_volume_factor >= 0.0)) throw InvalidArgument("gas molar volume factor must be >= 0");
}

void SolverLog::warn(std::string message) {
  if (messages.size() < kMaxLoggedMessages) messages.push_back(std::move(message));
}

void reaction_step(SystemState& state, double dt, const KineticConfig& config, SolverLog* log) {
  if (state.mode != Mode::Kinetic) throw ModeError("reaction_step needs a kinetic-mode system");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  detail::RegionView regions(state);
  const double gf = config.gas_molar_volume_factor;

  // Extents (amol of reaction events) from the pre-step state.
  std::vector<std::vector<double>> extents(regions.size(), std::vector<double>(state.rules.size(), 0.0));
  for (std::size_t r = 0; r < regions.size(); ++r) {
    if (regions.is_environment(r) && state.environment.unbounded) continue;
    const double volume = regions.volume(r, gf);
    Mixture consumption;
    bool any = false;
    for (std::size_t i = 0; i < state.rules.size(); ++i) {
      const Rule& rule = state.rules[i];
      if (rule.has_in_target() && regions[r].children.empty()) continue;
      const double v = rate_of(rule, regions, r, gf);
      if (!(v > 0.0)) continue;
      extents[r][i] = v * volume * dt;
      for (const auto& t : rule.reactants) consumption.add(t.species, t.count * extents[r][i]);
      any = true;
    }
    if (!any) continue;
    double scale = 1.0;
    consumption.for_each_nonzero([&](SpeciesId id, double need) {
      const double have = regions.amount(r, id);
      if (need > have) scale = std::min(scale, have / need);
    });
    if (scale < 1.0) {
      for (double& x : extents[r]) x *= scale;
      if (log) {
        ++log->reaction_clamps;
        log->warn("reaction extents scaled by " + std::to_string(scale) + " in '" + regions.id(r) +
                  "' at t=" + std::to_string(state.clock));
      }
    }
  }

  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (std::size_t i = 0; i < state.rules.size(); ++i) {
      const double x = extents[r][i];
      if (x == 0.0) continue;
      const Rule& rule = state.rules[i];
      for (const auto& t : rule.reactants) regions.change(r, t.species, -(t.count * x));
      for (const auto& p : rule.products) {
        const double amount = p.count * x;
        const bool gas = state.species[p.species].perm_class == PermClass::Gas;
        if (p.target == Target::In) {
          // Split over intact children in proportion to their volumes.
          double total = 0.0;
          for (int c : regions[r].children) total += regions.volume(static_cast<std::size_t>(c), 0.0);
          for (int c : regions[r].children) {
            const auto dest = static_cast<std::size_t>(c);
            const double share = amount * regions.volume(dest, 0.0) / total;
            regions.change(dest, p.species, share);
            if (gas) regions.add_gas(dest, share);
          }
          continue;
        }
        std::size_t dest = r;
        if (p.target == Target::Out) dest = regions.is_environment(r) ? r : static_cast<std::size_t>(regions[r].parent);
        regions.change(dest, p.species, amount);
        if (gas) regions.add_gas(dest, amount);
      }
    }
  }
}

double membrane_permeability(const SystemState& state, const Compartment& membrane, SpeciesId species) {
  const Species& sp = state.species[species];
  double p = 0.0;
  if (auto it = membrane.channels.find(species); it != membrane.channels.end()) {
    p = it->second;
  } else if (sp.permeability_override) {
    p = *sp.permeability_override;
  } else {
    p = state.permeability.get(sp.perm_class);
  }
  if (sp.perm_class != PermClass::Particle && membrane.boost_until && state.clock < *membrane.boost_until) {
    p *= membrane.permeability_boost;
  }
  return p;
}

void diffusion_step(SystemState& state, double dt, const KineticConfig& config, SolverLog* log) {
  if (state.mode != Mode::Kinetic) throw ModeError("diffusion_step needs a kinetic-mode system");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
  detail::RegionView regions(state);
  const double gf = config.gas_molar_volume_factor;
  const auto n_species = static_cast<std::uint32_t>(state.species.size());
  const bool env_unbounded = state.environment.unbounded;

  // Signed amount moving from parent into child; capped by the source.
  const auto move = [&](std::size_t child, std::size_t parent, SpeciesId id, double wanted) {
    if (wanted == 0.0) return;
    const bool parent_is_reservoir = regions.is_environment(parent) && env_unbounded;
    double actual = wanted;
    if (wanted > 0.0 && !parent_is_reservoir) {
      actual = std::min(wanted, regions.amount(parent, id));
    } else if (wanted < 0.0) {
      actual = -std::min(-wanted, regions.amount(child, id));
    }
    if (actual != wanted && log) {
      ++log->diffusion_clamps;
      log->warn("diffusion flux of '" + state.species[id].name + "' across '" + regions.id(child) +
                "' clamped at t=" + std::to_string(state.clock));
    }
    regions.change(parent, id, -actual);
    regions.change(child, id, actual);
  };

  if (config.diffusion_solver == DiffusionSolver::ForwardEuler) {
    struct Flux {
      std::size_t child, parent;
      SpeciesId id;
      double amount;
    };
    std::vector<Flux> fluxes;
    for (std::size_t r = 1; r < regions.size(); ++r) {
      const Compartment& membrane = *regions[r].compartment;
      const auto parent = static_cast<std::size_t>(regions[r].parent);
      const double area = sphere_area(membrane.diameter);
      for (std::uint32_t s = 0; s < n_species; ++s) {
        const SpeciesId id{s};
        const double p = membrane_permeability(state, membrane, id);
        if (p == 0.0) continue;
        const double gradient = regions.concentration(parent, id, gf) - regions.concentration(r, id, gf);
        if (gradient != 0.0) fluxes.push_back({r, parent, id, p * area * gradient * dt});
      }
    }
    for (const auto& f : fluxes) move(f.child, f.parent, f.id, f.amount);
    return;
  }

  for (std::size_t r = 1; r < regions.size(); ++r) {
    const Compartment& membrane = *regions[r].compartment;
    const auto parent = static_cast<std::size_t>(regions[r].parent);
    const double area = sphere_area(membrane.diameter);
    const double v_child = regions.volume(r, gf);
    const double inv_parent =
        regions.is_environment(parent) && env_unbounded ? 0.0 : 1.0 / regions.volume(parent, gf);
    const double alpha = 1.0 / v_child + inv_parent;
    for (std::uint32_t s = 0; s < n_species; ++s) {
      const SpeciesId id{s};
      const double p = membrane_permeability(state, membrane, id);
      if (p == 0.0) continue;
      const double gradient = regions.concentration(parent, id, gf) - regions.concentration(r, id, gf);
      if (gradient == 0.0) continue;
      const double k = p * area * alpha;
      move(r, parent, id, -gradient * std::expm1(-k * dt) / alpha);
    }
  }
}

std::vector<Event> swelling_and_burst(SystemState& state, const KineticConfig& config) {
  if (state.mode != Mode::Kinetic) throw ModeError("swelling_and_burst needs a kinetic-mode system");
  std::vector<Event> events;
  for (;;) {
    std::vector<std::tuple<int, std::string, bool>> due;  // depth, id, is root
    for (const auto& mvl : state.mvls) {
      if (mvl.lysed()) continue;
      for_each_compartment(mvl.root, [&](const Compartment& c) {
        if (c.membrane_intact &&
            c.effective_volume(config.gas_molar_volume_factor) > config.burst_volume_ratio * c.volume) {
          due.emplace_back(c.depth, c.id, c.depth == 1);
        }
      });
    }
    if (due.empty()) break;
    std::sort(due.begin(), due.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::get<1>(a) < std::get<1>(b);
    });
    for (const auto& [depth, id, is_root] : due) {
      if (is_root) {
        for (std::size_t m = 0; m < state.mvls.size(); ++m) {
          if (state.mvls[m].id() == id && !state.mvls[m].lysed()) {
            events.push_back(detail::liberate_root(state, m, EventKind::Burst));
            break;
          }
        }
      } else {
        Event e;
        if (detail::burst_inner(state, id, e)) events.push_back(std::move(e));
      }
    }
  }
  return events;
}

}  // namespace liposim::engine
