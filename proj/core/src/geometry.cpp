#include "liposim/geometry.hpp"

#include <cmath>
#include <string>

#include "liposim/error.hpp"

namespace liposim {

double sphere_volume(double diameter_um) {
  if (!(diameter_um > 0.0) || !std::isfinite(diameter_um)) {
    throw InvalidArgument("sphere diameter must be positive, got " + std::to_string(diameter_um));
  }
  return kPi / 6.0 * diameter_um * diameter_um * diameter_um;
}

double sphere_area(double diameter_um) {
  if (!(diameter_um > 0.0) || !std::isfinite(diameter_um)) {
    throw InvalidArgument("sphere diameter must be positive, got " + std::to_string(diameter_um));
  }
  return kPi * diameter_um * diameter_um;
}

double sphere_diameter(double volume_fl) {
  if (!(volume_fl > 0.0)) throw InvalidArgument("sphere volume must be positive");
  return std::cbrt(6.0 * volume_fl / kPi);
}

}  // namespace liposim
