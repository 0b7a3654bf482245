#include "liposim/audit.hpp"

#include <algorithm>
#include <cmath>

namespace liposim {

std::vector<double> atom_totals(const SystemState& state, std::span<const AtomTag> atoms) {
  std::vector<double> totals;
  totals.reserve(atoms.size());
  for (const auto& tag : atoms) {
    double t = 0.0;
    for (const auto& [species, weight] : tag.weights) t += weight * total_amount(state, species);
    totals.push_back(t);
  }
  return totals;
}

void AuditReport::start(const SystemState& state, std::span<const AtomTag> atoms) {
  tags.clear();
  for (const auto& a : atoms) tags.push_back(a.name);
  initial = atom_totals(state, atoms);
  final_totals = initial;
  max_relative_deviation.assign(atoms.size(), 0.0);
}

void AuditReport::update(const SystemState& state, std::span<const AtomTag> atoms) {
  final_totals = atom_totals(state, atoms);
  for (std::size_t i = 0; i < final_totals.size(); ++i) {
    const double scale = std::abs(initial[i]);
    const double diff = std::abs(final_totals[i] - initial[i]);
    const double rel = scale > 0.0 ? diff / scale : diff;
    max_relative_deviation[i] = std::max(max_relative_deviation[i], rel);
  }
}

void AuditReport::credit(SpeciesId species, double amount, std::span<const AtomTag> atoms) {
  for (std::size_t i = 0; i < atoms.size() && i < initial.size(); ++i) {
    for (const auto& [id, weight] : atoms[i].weights) {
      if (id == species) initial[i] += weight * amount;
    }
  }
}

double AuditReport::worst() const {
  double w = 0.0;
  for (double d : max_relative_deviation) w = std::max(w, d);
  return w;
}

}  // namespace liposim
