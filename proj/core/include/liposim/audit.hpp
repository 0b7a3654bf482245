#pragma once

// Conservation bookkeeping: weighted totals of tagged atoms (e.g. N counted
// twice per urea and once per NH3) over the whole system.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "liposim/types.hpp"

namespace liposim {

struct AtomTag {
  std::string name;
  std::vector<std::pair<SpeciesId, double>> weights;
};

std::vector<double> atom_totals(const SystemState& state, std::span<const AtomTag> atoms);

struct AuditReport {
  std::vector<std::string> tags;
  std::vector<double> initial;
  std::vector<double> final_totals;
  std::vector<double> max_relative_deviation;

  void start(const SystemState& state, std::span<const AtomTag> atoms);
  void update(const SystemState& state, std::span<const AtomTag> atoms);
  // Material added from outside (injection) raises the expected totals.
  void credit(SpeciesId species, double amount, std::span<const AtomTag> atoms);
  double worst() const;
};

}  // namespace liposim
