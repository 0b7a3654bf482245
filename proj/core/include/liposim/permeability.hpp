#pragma once

#include <array>
#include <cstddef>

#include "liposim/types_fwd.hpp"

namespace liposim {

// Built-in membrane permeability (um/s) for a qualitative permeability class.
// gas 100, small_polar 0.04, lipophilic 1.0; ionic, macromolecule and
// particle species never cross an unmodified bilayer.
double default_permeability(PermClass cls);

// Class -> coefficient table. Scenario files may override individual
// entries; species-level and per-membrane overrides take precedence.
class PermeabilityTable {
 public:
  PermeabilityTable();

  double get(PermClass cls) const { return values_[static_cast<std::size_t>(cls)]; }
  void set(PermClass cls, double um_per_s);

  bool operator==(const PermeabilityTable&) const = default;

 private:
  std::array<double, kPermClassCount> values_{};
};

}  // namespace liposim
