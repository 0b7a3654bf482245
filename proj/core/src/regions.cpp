#include "regions.hpp"

#include <algorithm>

namespace liposim::detail {

namespace {
const std::string kEnvironmentId{Environment::kId};
}

RegionView::RegionView(SystemState& state) : state_(state) {
  regions_.push_back(Region{});
  for (std::size_t m = 0; m < state.mvls.size(); ++m) {
    if (state.mvls[m].root.membrane_intact) collect(state.mvls[m].root, m, 0);
  }
}

void RegionView::collect(Compartment& c, std::size_t mvl, int parent) {
  const int index = static_cast<int>(regions_.size());
  regions_.push_back(Region{&c, mvl, parent, {}});
  regions_[static_cast<std::size_t>(parent)].children.push_back(index);
  for (auto& child : c.children) {
    if (child.membrane_intact) collect(child, mvl, index);
  }
}

double RegionView::amount(std::size_t region, SpeciesId id) const {
  if (region == 0) return state_.environment.contents[id];
  return regions_[region].compartment->contents[id];
}

double RegionView::volume(std::size_t region, double gas_factor) const {
  if (region == 0) return state_.environment.volume;
  return regions_[region].compartment->effective_volume(gas_factor);
}

void RegionView::change(std::size_t region, SpeciesId id, double delta) {
  if (delta == 0.0) return;
  if (region == 0) {
    state_.environment.receive(id, delta);
    return;
  }
  Mixture& m = regions_[region].compartment->contents;
  m.set(id, std::max(0.0, m[id] + delta));
}

void RegionView::add_gas(std::size_t region, double amount) {
  if (region == 0) {
    state_.environment.gas_accumulated += amount;
  } else {
    regions_[region].compartment->gas_accumulated += amount;
  }
}

const std::string& RegionView::id(std::size_t region) const {
  return region == 0 ? kEnvironmentId : regions_[region].compartment->id;
}

}  // namespace liposim::detail
