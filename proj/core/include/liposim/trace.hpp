#pragma once

// Time-ordered record of a run and its CSV / JSON renderings.
//
// CSV columns: time_s,compartment_id,depth,species,amount,concentration_mM,
// volume_fL,gas_amol,event. One row per (sample, compartment, species),
// then one row per event (per payload species, or one bare row for an
// empty payload). An `indicator` column is appended only when an
// indicator is configured.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "liposim/audit.hpp"
#include "liposim/types.hpp"

namespace liposim {

enum class HaltReason { Halt, Quiescence, MaxSteps };
std::string_view to_string(HaltReason reason);

// Boolean read-out standing in for a pH dye: true where the species'
// concentration is at or above the threshold.
struct Indicator {
  SpeciesId species;
  double threshold_mM = 0.0;
};

struct CompartmentSample {
  std::string id;
  int depth = 0;
  double volume_fL = 0.0;  // effective volume at sample time
  double gas_amol = 0.0;
  std::vector<double> amounts;  // indexed by species

  double concentration(std::size_t species) const { return amounts[species] / volume_fL; }
};

struct Sample {
  std::uint64_t step = 0;
  double time = 0.0;
  std::vector<CompartmentSample> compartments;  // environment first, then tree pre-order

  double total_objects() const;
};

struct Trace {
  Mode mode = Mode::Kinetic;
  std::vector<std::string> species;
  std::vector<Sample> samples;
  std::vector<Event> events;
  HaltReason halt = HaltReason::MaxSteps;
  std::uint64_t steps = 0;
  std::uint64_t reaction_clamps = 0;
  std::uint64_t diffusion_clamps = 0;
  std::vector<std::string> warnings;
  AuditReport audit;
  std::optional<Indicator> indicator;

  std::size_t count_events(EventKind kind) const;
};

// Snapshot of the environment and every intact compartment.
Sample take_sample(const SystemState& state, std::uint64_t step, double gas_molar_volume_factor);

// Writes an optional "# " comment line (meta) and then the header row.
void write_trace_csv(std::ostream& os, const Trace& trace, const std::string& meta_comment = {});

// Same rows as the CSV, as an array of objects with the CSV column names.
nlohmann::json trace_rows_json(const Trace& trace);

// Number formatting shared by every text output: shortest representation
// that round-trips.
std::string format_number(double value);

}  // namespace liposim
