#include "liposim/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace liposim {

std::string_view to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::Halt: return "halt";
    case HaltReason::Quiescence: return "quiescence";
    case HaltReason::MaxSteps: return "max_steps";
  }
  return "?";
}

double Sample::total_objects() const {
  double total = 0.0;
  for (const auto& c : compartments) {
    for (double a : c.amounts) total += a;
  }
  return total;
}

std::size_t Trace::count_events(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

Sample take_sample(const SystemState& state, std::uint64_t step, double gas_molar_volume_factor) {
  const std::size_t n = state.species.size();
  const auto amounts_of = [n](const Mixture& m) {
    std::vector<double> out(n, 0.0);
    for (std::uint32_t s = 0; s < n; ++s) out[s] = m[SpeciesId{s}];
    return out;
  };
  Sample sample;
  sample.step = step;
  sample.time = state.clock;
  sample.compartments.push_back(CompartmentSample{std::string(Environment::kId), 0, state.environment.volume,
                                                  state.environment.gas_accumulated,
                                                  amounts_of(state.environment.contents)});
  for (const auto& mvl : state.mvls) {
    if (mvl.lysed()) continue;
    for_each_compartment(mvl.root, [&](const Compartment& c) {
      sample.compartments.push_back(CompartmentSample{c.id, c.depth, c.effective_volume(gas_molar_volume_factor),
                                                      c.gas_accumulated, amounts_of(c.contents)});
    });
  }
  return sample;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

namespace {

struct Row {
  double time = 0.0;
  std::string id;
  int depth = 0;
  std::string species;
  std::optional<double> amount, concentration, volume, gas;
  std::string event;
  std::optional<bool> indicator;
};

template <typename F>
void for_each_row(const Trace& trace, F&& emit) {
  const bool kinetic = trace.mode == Mode::Kinetic;
  for (const auto& sample : trace.samples) {
    for (const auto& c : sample.compartments) {
      for (std::size_t s = 0; s < trace.species.size(); ++s) {
        Row row{sample.time, c.id, c.depth, trace.species[s], c.amounts[s], std::nullopt, c.volume_fL,
                c.gas_amol, {}, std::nullopt};
        if (kinetic) row.concentration = c.concentration(s);
        if (trace.indicator && trace.indicator->species.index == s && kinetic) {
          row.indicator = c.concentration(s) >= trace.indicator->threshold_mM;
        }
        emit(row);
      }
    }
  }
  for (const auto& e : trace.events) {
    const std::string kind(to_string(e.kind));
    bool any = false;
    e.payload.for_each_nonzero([&](SpeciesId id, double amount) {
      any = true;
      const std::string name = id.index < trace.species.size() ? trace.species[id.index] : std::string();
      emit(Row{e.time, e.compartment_id, e.depth, name, amount, std::nullopt, std::nullopt, std::nullopt, kind,
               std::nullopt});
    });
    if (!any) {
      emit(Row{e.time, e.compartment_id, e.depth, {}, std::nullopt, std::nullopt, std::nullopt, std::nullopt, kind,
               std::nullopt});
    }
  }
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// Ids and names are identifiers, but quote defensively.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace, const std::string& meta_comment) {
  if (!meta_comment.empty()) os << "# " << meta_comment << '\n';
  os << "time_s,compartment_id,depth,species,amount,concentration_mM,volume_fL,gas_amol,event";
  if (trace.indicator) os << ",indicator";
  os << '\n';
  for_each_row(trace, [&](const Row& r) {
    os << format_number(r.time) << ',' << csv_field(r.id) << ',' << r.depth << ',' << csv_field(r.species) << ','
       << opt(r.amount) << ',' << opt(r.concentration) << ',' << opt(r.volume) << ',' << opt(r.gas) << ','
       << r.event;
    if (trace.indicator) {
      os << ',';
      if (r.indicator) os << (*r.indicator ? "true" : "false");
    }
    os << '\n';
  });
}

nlohmann::json trace_rows_json(const Trace& trace) {
  auto rows = nlohmann::json::array();
  const auto num = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for_each_row(trace, [&](const Row& r) {
    nlohmann::json j{{"time_s", r.time},
                     {"compartment_id", r.id},
                     {"depth", r.depth},
                     {"species", r.species.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.species)},
                     {"amount", num(r.amount)},
                     {"concentration_mM", num(r.concentration)},
                     {"volume_fL", num(r.volume)},
                     {"gas_amol", num(r.gas)},
                     {"event", r.event.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.event)}};
    if (trace.indicator) j["indicator"] = r.indicator ? nlohmann::json(*r.indicator) : nlohmann::json(nullptr);
    rows.push_back(std::move(j));
  });
  return rows;
}

}  // namespace liposim
