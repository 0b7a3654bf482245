#pragma once

// JSON forms of the domain types. Field names follow the C++ members;
// mixtures are objects keyed by species name. Readers throw
// InvalidArgument on malformed input and InvariantError when the decoded
// object breaks a structural invariant.

#include <span>
#include <vector>

#include <json.hpp>

#include "liposim/population.hpp"
#include "liposim/types.hpp"

namespace liposim::json {

using nlohmann::json;

// Unknown species names are added to `species` (class small_polar) when
// `add_unknown` is set, rejected otherwise.
json mixture_to_json(const Mixture& mixture, const SpeciesTable& species);
Mixture mixture_from_json(const json& j, SpeciesTable& species, bool add_unknown = false);

json compartment_to_json(const Compartment& c, const SpeciesTable& species);
Compartment compartment_from_json(const json& j, SpeciesTable& species, bool add_unknown = false);

json mvl_to_json(const Mvl& mvl, const SpeciesTable& species);
Mvl mvl_from_json(const json& j, SpeciesTable& species, bool add_unknown = false);

// {"meta": meta, "mvls": [...]}; `meta` is omitted when null.
json population_to_json(std::span<const Mvl> mvls, const SpeciesTable& species, const json& meta = nullptr);
// Accepts the object form above or a bare array of MVLs.
std::vector<Mvl> population_from_json(const json& j, SpeciesTable& species);

json event_to_json(const Event& event, const SpeciesTable& species);
Event event_from_json(const json& j, SpeciesTable& species);
json events_to_json(std::span<const Event> events, const SpeciesTable& species);

json rule_to_json(const Rule& rule, const SpeciesTable& species);
Rule rule_from_json(const json& j, const SpeciesTable& species);

json state_to_json(const SystemState& state);
// Runs SystemState::validate on the result.
SystemState state_from_json(const json& j);

json stats_to_json(const PopulationStats& stats);

json generator_params_to_json(const GeneratorParams& params);
// Missing keys keep their defaults. Validates the result.
GeneratorParams generator_params_from_json(const json& j);

}  // namespace liposim::json
