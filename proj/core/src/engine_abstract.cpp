#include <algorithm>
#include <limits>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "regions.hpp"

namespace liposim::engine {

namespace {

bool has_intact_child(const Compartment& c) {
  return std::any_of(c.children.begin(), c.children.end(),
                     [](const Compartment& child) { return child.membrane_intact; });
}

bool covers(const Mixture& available, const Mixture& required) {
  bool ok = true;
  required.for_each_nonzero([&](SpeciesId id, double need) { ok = ok && available[id] >= need; });
  return ok;
}

int priority_of(const Rule& rule) {
  if (const auto* law = std::get_if<AbstractLaw>(&rule.kinetics)) return law->priority;
  return 0;
}

}  // namespace

bool applicable(const Rule& rule, const Mixture& available, bool intact_child) {
  if (rule.has_in_target() && !intact_child) return false;
  return covers(available, rule.requirement());
}

bool applicable(const Rule& rule, const Compartment& compartment) {
  if (!compartment.membrane_intact) return false;
  return applicable(rule, compartment.contents, has_intact_child(compartment));
}

StepReport maximal_step(SystemState& state, Rng& rng) {
  if (state.mode != Mode::Abstract) throw ModeError("maximal_step needs an abstract-mode system");
  detail::RegionView regions(state);

  std::vector<Mixture> requirements;
  requirements.reserve(state.rules.size());
  for (const auto& rule : state.rules) requirements.push_back(rule.requirement());

  StepReport report;
  std::vector<Mixture> residuals(regions.size());
  std::vector<std::vector<std::size_t>> fired(regions.size());

  // Phase 1: per compartment, reserve reactants and catalysts greedily.
  for (std::size_t r = 1; r < regions.size(); ++r) {
    Mixture residual = regions[r].compartment->contents;
    const bool intact_child = !regions[r].children.empty();
    std::vector<std::size_t> candidates;
    for (;;) {
      candidates.clear();
      int top = std::numeric_limits<int>::min();
      for (std::size_t i = 0; i < state.rules.size(); ++i) {
        const Rule& rule = state.rules[i];
        if (rule.has_in_target() && !intact_child) continue;
        if (!covers(residual, requirements[i])) continue;
        const int p = priority_of(rule);
        if (p > top) {
          top = p;
          candidates.clear();
        }
        if (p == top) candidates.push_back(i);
      }
      if (candidates.empty()) break;
      const std::size_t pick = candidates[uniform_index(rng, candidates.size())];
      requirements[pick].for_each_nonzero(
          [&](SpeciesId id, double need) { residual.set(id, residual[id] - need); });
      fired[r].push_back(pick);
      report.applications.push_back(Application{pick, regions.id(r)});
    }
    report.residual.emplace_back(regions.id(r), residual);
    residuals[r] = std::move(residual);
  }

  if (report.applications.empty()) {
    report.halted = true;
    return report;
  }

  // Phase 2: fire everything at once. Catalysts come back unchanged.
  std::vector<Mixture> incoming(regions.size());
  for (std::size_t r = 1; r < regions.size(); ++r) {
    for (std::size_t rule_index : fired[r]) {
      const Rule& rule = state.rules[rule_index];
      for (const auto& cat : rule.catalysts) incoming[r].add(cat.species, cat.count);
      for (const auto& product : rule.products) {
        std::size_t dest = r;
        if (product.target == Target::Out) {
          dest = static_cast<std::size_t>(regions[r].parent);
        } else if (product.target == Target::In) {
          const auto& kids = regions[r].children;
          dest = static_cast<std::size_t>(kids[uniform_index(rng, kids.size())]);
        }
        incoming[dest].add(product.species, product.count);
      }
    }
  }

  for (std::size_t r = 1; r < regions.size(); ++r) {
    Mixture next = std::move(residuals[r]);
    next.add(incoming[r]);
    regions[r].compartment->contents = std::move(next);
  }
  incoming[0].for_each_nonzero([&](SpeciesId id, double amount) { regions.change(0, id, amount); });
  return report;
}

}  // namespace liposim::engine
