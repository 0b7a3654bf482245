#include <algorithm>
#include <cmath>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"

namespace liposim::engine {

namespace {

constexpr double kQuiescenceTolerance = 1e-12;

// Per species: sum of |change| over every place, relative to the most of
// that species the system has held at once. A running peak rather than the
// current amount, so a species decaying toward zero still counts as settled.
bool changed_noticeably(const SystemState& before, const SystemState& after, std::vector<double>& peak) {
  const std::size_t n = before.species.size();
  std::vector<double> moved(n, 0.0), held(n, 0.0);
  peak.resize(n, 0.0);
  const auto compare = [&](const Mixture& a, const Mixture& b) {
    for (std::uint32_t s = 0; s < n; ++s) {
      const SpeciesId id{s};
      moved[s] += std::abs(b[id] - a[id]);
      held[s] += std::abs(a[id]);
    }
  };
  compare(before.environment.contents, after.environment.contents);
  for (std::uint32_t s = 0; s < n; ++s) {
    const SpeciesId id{s};
    const double a = before.environment.exchanged_amount(id);
    moved[s] += std::abs(after.environment.exchanged_amount(id) - a);
    held[s] += std::abs(a);
  }
  if (before.mvls.size() != after.mvls.size()) return true;
  for (std::size_t m = 0; m < before.mvls.size(); ++m) {
    std::vector<const Compartment*> a, b;
    for_each_compartment(before.mvls[m].root, [&](const Compartment& c) { a.push_back(&c); });
    for_each_compartment(after.mvls[m].root, [&](const Compartment& c) { b.push_back(&c); });
    if (a.size() != b.size()) return true;
    for (std::size_t i = 0; i < a.size(); ++i) compare(a[i]->contents, b[i]->contents);
  }
  bool changed = false;
  for (std::size_t s = 0; s < n; ++s) {
    peak[s] = std::max(peak[s], held[s]);
    if (moved[s] > kQuiescenceTolerance * peak[s]) changed = true;
  }
  return changed;
}

bool electroporation_active(const SystemState& state) {
  return std::any_of(state.mvls.begin(), state.mvls.end(),
                     [](const Mvl& m) { return m.root.boost_until.has_value(); });
}

class Runner {
 public:
  Runner(SystemState& state, const RunConfig& config, const Schedule& schedule, std::span<const AtomTag> atoms)
      : state_(state), config_(config), atoms_(atoms), schedule_(schedule) {
    std::stable_sort(schedule_.begin(), schedule_.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
    trace_.mode = state.mode;
    for (const auto& sp : state.species.all()) trace_.species.push_back(sp.name);
    trace_.indicator = config.indicator;
    trace_.audit.start(state, atoms);
  }

  Trace run() {
    if (config_.sample_every == 0) throw InvalidArgument("sample_every must be >= 1");
    if (state_.mode == Mode::Kinetic) config_.kinetic.validate();
    record_sample(0);
    try {
      if (state_.mode == Mode::Kinetic) {
        run_kinetic();
      } else {
        run_abstract();
      }
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationError("step " + std::to_string(trace_.steps) + ": " + e.what());
    }
    if (trace_.samples.back().step != trace_.steps) record_sample(trace_.steps);
    trace_.events.push_back(Event{state_.clock, EventKind::Halt, std::string(Environment::kId), 0, {},
                                  std::string(to_string(trace_.halt))});
    std::stable_sort(trace_.events.begin(), trace_.events.end(), event_before);
    return std::move(trace_);
  }

 private:
  double gas_factor() const {
    return state_.mode == Mode::Kinetic ? config_.kinetic.gas_molar_volume_factor : 0.0;
  }

  void record_sample(std::uint64_t step) { trace_.samples.push_back(take_sample(state_, step, gas_factor())); }

  void after_step() {
    ++trace_.steps;
    trace_.audit.update(state_, atoms_);
    if (trace_.steps % config_.sample_every == 0) record_sample(trace_.steps);
  }

  void add_events(std::vector<Event> events) {
    for (auto& e : events) trace_.events.push_back(std::move(e));
  }

  bool schedule_pending() const { return next_op_ < schedule_.size(); }

  // Applies every intervention due at the current clock. `slack` absorbs
  // rounding in a clock built from repeated additions.
  void apply_due(double slack) {
    while (next_op_ < schedule_.size() && schedule_[next_op_].time <= state_.clock + slack) {
      const auto& op = schedule_[next_op_++];
      auto events = apply_intervention(state_, op);
      if (const auto* inject = std::get_if<InjectOp>(&op.op)) {
        trace_.audit.credit(inject->species, inject->amount, atoms_);
      }
      add_events(std::move(events));
    }
  }

  void run_kinetic() {
    const KineticConfig& kc = config_.kinetic;
    const double start = state_.clock;
    const double slack = kc.dt * 1e-9;
    SolverLog log;
    trace_.halt = HaltReason::MaxSteps;
    for (std::uint64_t step = 0; step < kc.max_steps; ++step) {
      apply_due(slack);
      add_events(expire_electroporation(state_));

      SystemState next = state_;
      reaction_step(next, kc.dt, kc, &log);
      diffusion_step(next, kc.dt, kc, &log);
      next.clock = start + static_cast<double>(step + 1) * kc.dt;
      auto events = swelling_and_burst(next, kc);

      const bool changed = changed_noticeably(state_, next, peak_);
      if (!changed && events.empty() && !schedule_pending() && !electroporation_active(state_)) {
        trace_.halt = HaltReason::Quiescence;
        break;
      }
      state_ = std::move(next);
      add_events(std::move(events));
      after_step();
    }
    trace_.reaction_clamps = log.reaction_clamps;
    trace_.diffusion_clamps = log.diffusion_clamps;
    trace_.warnings = std::move(log.messages);
  }

  void run_abstract() {
    Rng rng(config_.abstract.rng_seed);
    trace_.halt = HaltReason::MaxSteps;
    for (std::uint64_t step = 0; step < config_.abstract.max_steps; ++step) {
      apply_due(0.0);
      const StepReport report = maximal_step(state_, rng);
      if (report.halted && !schedule_pending()) {
        trace_.halt = HaltReason::Halt;
        break;
      }
      // With interventions still pending, an idle step lets time reach them.
      state_.clock += 1.0;
      after_step();
    }
  }

  SystemState& state_;
  RunConfig config_;
  std::span<const AtomTag> atoms_;
  Schedule schedule_;
  std::size_t next_op_ = 0;
  std::vector<double> peak_;
  Trace trace_;
};

}  // namespace

Trace run(SystemState& state, const RunConfig& config, const Schedule& schedule, std::span<const AtomTag> atoms) {
  return Runner(state, config, schedule, atoms).run();
}

}  // namespace liposim::engine
