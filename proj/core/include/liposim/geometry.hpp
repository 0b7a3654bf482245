#pragma once

namespace liposim {

inline constexpr double kPi = 3.14159265358979323846;

// Volume of a sphere in um^3 (== fL). Throws InvalidArgument for d <= 0.
double sphere_volume(double diameter_um);

// Membrane area of a sphere in um^2. Throws InvalidArgument for d <= 0.
double sphere_area(double diameter_um);

// Inverse of sphere_volume.
double sphere_diameter(double volume_fl);

}  // namespace liposim
