#pragma once

// P-system dynamics over a SystemState.
//
// Abstract mode rewrites integer multisets with maximally parallel steps.
// Kinetic mode integrates reactions, membrane diffusion and gas-driven
// swelling with a fixed step, in that order, until nothing changes.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "liposim/audit.hpp"
#include "liposim/random.hpp"
#include "liposim/trace.hpp"
#include "liposim/types.hpp"

namespace liposim::engine {

enum class DiffusionSolver {
  // Simultaneous explicit fluxes; first order in dt.
  ForwardEuler,
  // Each membrane relaxes its two sides exactly over dt, membranes in tree
  // order. Stable for any dt.
  AnalyticPairwise,
};

std::string_view to_string(DiffusionSolver solver);
std::optional<DiffusionSolver> parse_diffusion_solver(std::string_view text);

struct KineticConfig {
  double dt = 0.01;  // s
  std::uint64_t max_steps = 100000;
  // Burst when effective volume / initial volume exceeds this.
  double burst_volume_ratio = 1.06;
  // fL of swelling per amol of accumulated gas.
  double gas_molar_volume_factor = 0.025;
  DiffusionSolver diffusion_solver = DiffusionSolver::AnalyticPairwise;

  void validate() const;
  bool operator==(const KineticConfig&) const = default;
};

enum class InTargetPolicy { RandomChild };

struct AbstractConfig {
  std::uint64_t max_steps = 1000;
  std::uint64_t rng_seed = 0;
  InTargetPolicy in_target_policy = InTargetPolicy::RandomChild;
  bool operator==(const AbstractConfig&) const = default;
};

struct RunConfig {
  KineticConfig kinetic;
  AbstractConfig abstract;
  std::uint64_t sample_every = 1;
  std::optional<Indicator> indicator;
};

// Scheduled interventions.
struct DcPulseOp {
  std::vector<std::string> targets;
};
struct ElectroporateOp {
  std::string mvl_id;
  double duration = 0.0;  // s
  double boost = 1.0;
};
struct InjectOp {
  std::string compartment_id;
  SpeciesId species;
  double amount = 0.0;  // amol, or objects in abstract mode
};
struct InsertChannelOp {
  std::string compartment_id;
  SpeciesId species;
  double permeability = 0.0;  // um/s
};

struct ScheduledIntervention {
  double time = 0.0;  // s
  std::variant<DcPulseOp, ElectroporateOp, InjectOp, InsertChannelOp> op;
};
using Schedule = std::vector<ScheduledIntervention>;

// ---------------------------------------------------------------------------
// Abstract mode

// contents >= reactants + catalysts, and an `in` product has somewhere to go.
bool applicable(const Rule& rule, const Compartment& compartment);
bool applicable(const Rule& rule, const Mixture& available, bool has_intact_child);

struct Application {
  std::size_t rule = 0;  // index into SystemState::rules
  std::string compartment_id;
};

struct StepReport {
  bool halted = false;
  std::vector<Application> applications;
  // Contents left after reserving reactants and catalysts, before products
  // arrive. No rule is applicable to any of these.
  std::vector<std::pair<std::string, Mixture>> residual;
};

// One maximally parallel step. Per compartment, rules are picked uniformly
// at random among the applicable ones of the highest priority present and
// their reactants and catalysts reserved, until nothing fits. Then all
// applications fire at once; `in` products go to a uniformly chosen intact
// child per application. The environment only receives objects. Throws
// ModeError outside abstract mode.
StepReport maximal_step(SystemState& state, Rng& rng);

// ---------------------------------------------------------------------------
// Kinetic mode

struct SolverLog {
  std::uint64_t reaction_clamps = 0;
  std::uint64_t diffusion_clamps = 0;
  std::vector<std::string> messages;  // first few only

  void warn(std::string message);
};

// Michaelis-Menten or mass-action rates per compartment; extents are
// scaled down proportionally when a step would drive an amount negative.
void reaction_step(SystemState& state, double dt, const KineticConfig& config = {},
                   SolverLog* log = nullptr);

// Fick flux J = P * A * (c_parent - c_child) across every intact membrane.
// Totals are conserved; a move is capped at what its source holds.
void diffusion_step(SystemState& state, double dt, const KineticConfig& config = {},
                    SolverLog* log = nullptr);

// Bursts every compartment whose gas swelling passes the ratio, deepest
// first. Contents and gas go to the parent, children move up one level.
// A burst root liberates its children as new MVLs.
std::vector<Event> swelling_and_burst(SystemState& state, const KineticConfig& config = {});

// Effective permeability of `membrane` for a species at the current clock.
double membrane_permeability(const SystemState& state, const Compartment& membrane, SpeciesId species);

// ---------------------------------------------------------------------------
// Interventions

// Lyses each target's outer membrane; its children become new MVLs.
// Throws UnknownIdError before touching anything if a target is unknown.
std::vector<Event> dc_pulse(SystemState& state, std::span<const std::string> targets);

// Multiplies the outer membrane permeability of every non-particle species
// by `boost` for `duration` seconds of simulated time.
Event electroporate(SystemState& state, std::string_view mvl_id, double duration, double boost);

// Closes electroporation windows that ended at or before the clock.
std::vector<Event> expire_electroporation(SystemState& state);

Event microinject(SystemState& state, std::string_view compartment_id, SpeciesId species, double amount);

void insert_channel(SystemState& state, std::string_view compartment_id, SpeciesId species,
                    double permeability);

std::vector<Event> apply_intervention(SystemState& state, const ScheduledIntervention& intervention);

// ---------------------------------------------------------------------------

// Runs to halt, quiescence or max_steps. Mutates `state` to the final
// state. Throws SimulationError (with the step index) on failure.
Trace run(SystemState& state, const RunConfig& config, const Schedule& schedule = {},
          std::span<const AtomTag> atoms = {});

}  // namespace liposim::engine
