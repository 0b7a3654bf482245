#pragma once

#include <string_view>

#include "liposim/types.hpp"

namespace liposim::detail {

// Destroys the outer membrane of mvls[index]: contents and gas go to the
// environment, every child becomes the root of a new MVL inserted right
// after the husk. Returns the event (payload = released contents).
Event liberate_root(SystemState& state, std::size_t index, EventKind kind);

// Destroys an inner compartment: contents and gas go to its parent, its
// children take its place one level up. Returns false if `id` is not an
// intact inner compartment.
bool burst_inner(SystemState& state, std::string_view id, Event& event);

// Keeps morphology consistent with the tree height after a structural change.
void refresh_morphology(Mvl& mvl);

}  // namespace liposim::detail
