#include "liposim/permeability.hpp"

#include <cmath>

#include "liposim/error.hpp"

namespace liposim {

double default_permeability(PermClass cls) {
  switch (cls) {
    case PermClass::Gas:
      return 100.0;
    case PermClass::SmallPolar:
      return 0.04;
    case PermClass::Lipophilic:
      return 1.0;
    case PermClass::Ionic:
    case PermClass::Macromolecule:
    case PermClass::Particle:
      return 0.0;
  }
  return 0.0;
}

PermeabilityTable::PermeabilityTable() {
  for (std::size_t i = 0; i < kPermClassCount; ++i) {
    values_[i] = default_permeability(static_cast<PermClass>(i));
  }
}

void PermeabilityTable::set(PermClass cls, double um_per_s) {
  if (!(um_per_s >= 0.0) || !std::isfinite(um_per_s)) {
    throw InvalidArgument("permeability must be a finite value >= 0");
  }
  values_[static_cast<std::size_t>(cls)] = um_per_s;
}

}  // namespace liposim
