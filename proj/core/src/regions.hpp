#pragma once

// Flat view over the environment and every intact compartment, so the
// engine can treat "a place holding a mixture" uniformly. Pointers are
// valid until the tree structure changes (burst, lysis).

#include <vector>

#include "liposim/types.hpp"

namespace liposim::detail {

struct Region {
  Compartment* compartment = nullptr;  // null for the environment
  std::size_t mvl = 0;                 // index into SystemState::mvls
  int parent = -1;                     // region index; -1 for the environment
  std::vector<int> children;           // intact child regions
};

class RegionView {
 public:
  explicit RegionView(SystemState& state);

  std::size_t size() const { return regions_.size(); }
  Region& operator[](std::size_t i) { return regions_[i]; }
  const Region& operator[](std::size_t i) const { return regions_[i]; }

  bool is_environment(std::size_t i) const { return i == 0; }

  double amount(std::size_t region, SpeciesId id) const;
  // Volume used for concentrations: effective (swollen) volume for
  // compartments, the declared volume for the environment.
  double volume(std::size_t region, double gas_factor) const;
  double concentration(std::size_t region, SpeciesId id, double gas_factor) const {
    return amount(region, id) / volume(region, gas_factor);
  }

  // Signed change of a region's amount. An unbounded environment books it
  // as exchange instead of changing its fixed contents.
  void change(std::size_t region, SpeciesId id, double delta);
  void add_gas(std::size_t region, double amount);

  const std::string& id(std::size_t region) const;

 private:
  void collect(Compartment& c, std::size_t mvl, int parent);

  SystemState& state_;
  std::vector<Region> regions_;
};

}  // namespace liposim::detail
