#include "liposim/serialize_json.hpp"

#include <algorithm>
#include <iterator>
#include <string>

#include "liposim/error.hpp"

namespace liposim::json {

namespace {

[[noreturn]] void fail(const std::string& what) { throw InvalidArgument("json: " + what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::string text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(std::string("field '") + key + "' has the wrong type");
  }
}

std::uint32_t count_of(const json& j) {
  const double c = get_or<double>(j, "count", 1.0);
  if (!(c >= 1.0) || c != static_cast<double>(static_cast<std::uint32_t>(c))) {
    fail("stoichiometry must be a positive integer");
  }
  return static_cast<std::uint32_t>(c);
}

SpeciesId species_ref(const json& j, const SpeciesTable& species) {
  const std::string name = text(j, "species");
  auto id = species.find(name);
  if (!id) fail("unknown species '" + name + "'");
  return *id;
}

template <typename E, typename P>
E enum_of(const json& j, const char* key, P parse) {
  const std::string s = text(j, key);
  auto v = parse(s);
  if (!v) fail(std::string("bad value '") + s + "' for '" + key + "'");
  return *v;
}

json summary_json(const Summary& s) {
  return json{{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
}

json optional_summary(const std::optional<Summary>& s) { return s ? summary_json(*s) : json(nullptr); }

json spec_json(const TruncatedSpec& s) {
  return json{{"mean", s.mean}, {"sd", s.sd}, {"low", s.low}, {"high", s.high}};
}

TruncatedSpec spec_from(const json& j, TruncatedSpec fallback) {
  if (!j.is_object()) fail("distribution must be an object with mean, sd, low, high");
  return TruncatedSpec{get_or(j, "mean", fallback.mean), get_or(j, "sd", fallback.sd),
                       get_or(j, "low", fallback.low), get_or(j, "high", fallback.high)};
}

}  // namespace

json mixture_to_json(const Mixture& mixture, const SpeciesTable& species) {
  json out = json::object();
  mixture.for_each_nonzero([&](SpeciesId id, double amount) { out[species[id].name] = amount; });
  return out;
}

Mixture mixture_from_json(const json& j, SpeciesTable& species, bool add_unknown) {
  if (!j.is_object()) fail("mixture must be an object keyed by species name");
  Mixture m;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) fail("amount of '" + name + "' must be a number");
    auto id = species.find(name);
    if (!id) {
      if (!add_unknown) fail("unknown species '" + name + "'");
      id = species.add(Species{name, PermClass::SmallPolar, std::nullopt});
    }
    m.set(*id, value.get<double>());
  }
  return m;
}

json compartment_to_json(const Compartment& c, const SpeciesTable& species) {
  json j{{"id", c.id},
         {"depth", c.depth},
         {"diameter", c.diameter},
         {"volume", c.volume},
         {"gas_accumulated", c.gas_accumulated},
         {"membrane_intact", c.membrane_intact},
         {"contents", mixture_to_json(c.contents, species)}};
  if (!c.channels.empty()) {
    json channels = json::object();
    for (const auto& [id, p] : c.channels) channels[species[id].name] = p;
    j["channels"] = std::move(channels);
  }
  if (c.boost_until) {
    j["permeability_boost"] = c.permeability_boost;
    j["boost_until"] = *c.boost_until;
  }
  json children = json::array();
  for (const auto& child : c.children) children.push_back(compartment_to_json(child, species));
  j["children"] = std::move(children);
  return j;
}

Compartment compartment_from_json(const json& j, SpeciesTable& species, bool add_unknown) {
  Compartment c;
  c.id = text(j, "id");
  if (c.id.empty()) fail("compartment id must not be empty");
  c.depth = static_cast<int>(number(j, "depth"));
  c.diameter = number(j, "diameter");
  if (!(c.diameter > 0.0)) fail("compartment '" + c.id + "' needs a positive diameter");
  c.volume = j.contains("volume") ? number(j, "volume") : Compartment::sphere(c.id, c.depth, c.diameter).volume;
  c.gas_accumulated = get_or(j, "gas_accumulated", 0.0);
  c.membrane_intact = get_or(j, "membrane_intact", true);
  if (j.contains("contents")) c.contents = mixture_from_json(j["contents"], species, add_unknown);
  if (j.contains("channels")) {
    Mixture channels = mixture_from_json(j["channels"], species, add_unknown);
    channels.for_each_nonzero([&](SpeciesId id, double p) { c.channels[id] = p; });
    // A zero-permeability channel is meaningful (it blocks the species).
    for (const auto& [name, value] : j["channels"].items()) {
      if (value.is_number() && value.get<double>() == 0.0) c.channels[species.at(name)] = 0.0;
    }
  }
  c.permeability_boost = get_or(j, "permeability_boost", 1.0);
  if (j.contains("boost_until") && !j["boost_until"].is_null()) c.boost_until = number(j, "boost_until");
  if (j.contains("children")) {
    const json& kids = j["children"];
    if (!kids.is_array()) fail("children must be an array");
    for (const auto& k : kids) c.children.push_back(compartment_from_json(k, species, add_unknown));
  }
  return c;
}

json mvl_to_json(const Mvl& mvl, const SpeciesTable& species) {
  return json{{"morphology", to_string(mvl.morphology)},
              {"environment_id", mvl.environment_id},
              {"root", compartment_to_json(mvl.root, species)}};
}

Mvl mvl_from_json(const json& j, SpeciesTable& species, bool add_unknown) {
  Mvl mvl;
  mvl.morphology = enum_of<Morphology>(j, "morphology", parse_morphology);
  mvl.environment_id = get_or<std::string>(j, "environment_id", std::string(Environment::kId));
  mvl.root = compartment_from_json(field(j, "root"), species, add_unknown);
  mvl.validate();
  return mvl;
}

json population_to_json(std::span<const Mvl> mvls, const SpeciesTable& species, const json& meta) {
  json arr = json::array();
  for (const auto& m : mvls) arr.push_back(mvl_to_json(m, species));
  json out = json::object();
  if (!meta.is_null()) out["meta"] = meta;
  out["mvls"] = std::move(arr);
  return out;
}

std::vector<Mvl> population_from_json(const json& j, SpeciesTable& species) {
  const json& arr = j.is_array() ? j : field(j, "mvls");
  if (!arr.is_array()) fail("'mvls' must be an array");
  std::vector<Mvl> out;
  out.reserve(arr.size());
  try {
    for (const auto& m : arr) out.push_back(mvl_from_json(m, species, true));
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  return out;
}

json event_to_json(const Event& event, const SpeciesTable& species) {
  json j{{"time", event.time},
         {"kind", to_string(event.kind)},
         {"compartment_id", event.compartment_id},
         {"depth", event.depth},
         {"payload", mixture_to_json(event.payload, species)}};
  if (!event.note.empty()) j["note"] = event.note;
  return j;
}

Event event_from_json(const json& j, SpeciesTable& species) {
  Event e;
  e.time = number(j, "time");
  e.kind = enum_of<EventKind>(j, "kind", parse_event_kind);
  e.compartment_id = text(j, "compartment_id");
  e.depth = get_or(j, "depth", 0);
  if (j.contains("payload")) e.payload = mixture_from_json(j["payload"], species);
  e.note = get_or<std::string>(j, "note", {});
  return e;
}

json events_to_json(std::span<const Event> events, const SpeciesTable& species) {
  json arr = json::array();
  for (const auto& e : events) arr.push_back(event_to_json(e, species));
  return arr;
}

json rule_to_json(const Rule& rule, const SpeciesTable& species) {
  const auto terms = [&](const std::vector<Term>& ts) {
    json arr = json::array();
    for (const auto& t : ts) arr.push_back(json{{"species", species[t.species].name}, {"count", t.count}});
    return arr;
  };
  json products = json::array();
  for (const auto& p : rule.products) {
    products.push_back(
        json{{"species", species[p.species].name}, {"count", p.count}, {"target", to_string(p.target)}});
  }
  json kinetics;
  if (const auto* a = std::get_if<AbstractLaw>(&rule.kinetics)) {
    kinetics = json{{"type", "abstract"}, {"priority", a->priority}};
  } else if (const auto* ma = std::get_if<MassActionLaw>(&rule.kinetics)) {
    kinetics = json{{"type", "mass_action"}, {"k", ma->k}};
  } else {
    const auto& mm = std::get<MichaelisMentenLaw>(rule.kinetics);
    kinetics = json{{"type", "michaelis_menten"},
                    {"kcat", mm.kcat},
                    {"km", mm.km},
                    {"enzyme", species[mm.enzyme].name}};
  }
  return json{{"name", rule.name},
              {"reactants", terms(rule.reactants)},
              {"catalysts", terms(rule.catalysts)},
              {"products", std::move(products)},
              {"kinetics", std::move(kinetics)}};
}

Rule rule_from_json(const json& j, const SpeciesTable& species) {
  Rule rule;
  rule.name = text(j, "name");
  const auto terms = [&](const char* key) {
    std::vector<Term> out;
    auto it = j.find(key);
    if (it == j.end()) return out;
    if (!it->is_array()) fail(std::string("'") + key + "' must be an array");
    for (const auto& t : *it) out.push_back(Term{species_ref(t, species), count_of(t)});
    return out;
  };
  rule.reactants = terms("reactants");
  rule.catalysts = terms("catalysts");
  if (auto it = j.find("products"); it != j.end()) {
    if (!it->is_array()) fail("'products' must be an array");
    for (const auto& p : *it) {
      Target target = Target::Here;
      if (p.contains("target")) target = enum_of<Target>(p, "target", parse_target);
      rule.products.push_back(Product{species_ref(p, species), count_of(p), target});
    }
  }
  const json& k = field(j, "kinetics");
  const std::string type = text(k, "type");
  if (type == "abstract") {
    rule.kinetics = AbstractLaw{get_or(k, "priority", 0)};
  } else if (type == "mass_action") {
    rule.kinetics = MassActionLaw{number(k, "k")};
  } else if (type == "michaelis_menten") {
    const std::string enzyme = text(k, "enzyme");
    auto id = species.find(enzyme);
    if (!id) fail("unknown enzyme '" + enzyme + "'");
    rule.kinetics = MichaelisMentenLaw{number(k, "kcat"), number(k, "km"), *id};
  } else {
    fail("unknown kinetics type '" + type + "'");
  }
  return rule;
}

json state_to_json(const SystemState& state) {
  json species = json::array();
  for (const auto& sp : state.species.all()) {
    json s{{"name", sp.name}, {"perm_class", to_string(sp.perm_class)}};
    if (sp.permeability_override) s["permeability_override"] = *sp.permeability_override;
    species.push_back(std::move(s));
  }
  json permeability = json::object();
  for (std::size_t c = 0; c < kPermClassCount; ++c) {
    const auto cls = static_cast<PermClass>(c);
    permeability[std::string(to_string(cls))] = state.permeability.get(cls);
  }
  const Environment& env = state.environment;
  json environment{{"id", Environment::kId},
                   {"unbounded", env.unbounded},
                   {"volume", env.volume},
                   {"gas_accumulated", env.gas_accumulated},
                   {"contents", mixture_to_json(env.contents, state.species)}};
  for (std::uint32_t s = 0; s < env.exchanged.size(); ++s) {
    // Net exchange is signed; keep it as plain numbers.
    if (env.exchanged[s] != 0.0) environment["exchanged"][state.species[SpeciesId{s}].name] = env.exchanged[s];
  }
  json mvls = json::array();
  for (const auto& m : state.mvls) mvls.push_back(mvl_to_json(m, state.species));
  json rules = json::array();
  for (const auto& r : state.rules) rules.push_back(rule_to_json(r, state.species));
  return json{{"mode", to_string(state.mode)},
              {"clock", state.clock},
              {"rng_seed", state.rng_seed},
              {"species", std::move(species)},
              {"permeability", std::move(permeability)},
              {"environment", std::move(environment)},
              {"mvls", std::move(mvls)},
              {"rules", std::move(rules)}};
}

SystemState state_from_json(const json& j) {
  try {
    SystemState state;
    state.mode = enum_of<Mode>(j, "mode", parse_mode);
    state.clock = get_or(j, "clock", 0.0);
    state.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0);
    const json& species = field(j, "species");
    if (!species.is_array()) fail("'species' must be an array");
    for (const auto& s : species) {
      Species sp{text(s, "name"), enum_of<PermClass>(s, "perm_class", parse_perm_class), std::nullopt};
      if (s.contains("permeability_override")) sp.permeability_override = number(s, "permeability_override");
      state.species.add(std::move(sp));
    }
    if (auto it = j.find("permeability"); it != j.end()) {
      if (!it->is_object()) fail("'permeability' must be an object");
      for (const auto& [name, value] : it->items()) {
        auto cls = parse_perm_class(name);
        if (!cls) fail("unknown permeability class '" + name + "'");
        if (!value.is_number()) fail("permeability of '" + name + "' must be a number");
        state.permeability.set(*cls, value.get<double>());
      }
    }
    if (auto it = j.find("environment"); it != j.end()) {
      const json& e = *it;
      Environment& env = state.environment;
      env.unbounded = get_or(e, "unbounded", true);
      env.volume = get_or(e, "volume", 1.0);
      if (!(env.volume > 0.0)) fail("environment volume must be > 0");
      env.gas_accumulated = get_or(e, "gas_accumulated", 0.0);
      if (e.contains("contents")) env.contents = mixture_from_json(e["contents"], state.species);
      if (auto x = e.find("exchanged"); x != e.end()) {
        if (!x->is_object()) fail("'exchanged' must be an object");
        for (const auto& [name, value] : x->items()) {
          if (!value.is_number()) fail("exchanged amount of '" + name + "' must be a number");
          env.receive(state.species.at(name), value.get<double>());
        }
      }
    }
    if (auto it = j.find("mvls"); it != j.end()) {
      if (!it->is_array()) fail("'mvls' must be an array");
      for (const auto& m : *it) state.mvls.push_back(mvl_from_json(m, state.species));
    }
    if (auto it = j.find("rules"); it != j.end()) {
      if (!it->is_array()) fail("'rules' must be an array");
      for (const auto& r : *it) state.rules.push_back(rule_from_json(r, state.species));
    }
    state.validate();
    return state;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  } catch (const std::out_of_range& e) {
    fail(e.what());
  }
}

json stats_to_json(const PopulationStats& stats) {
  json counts = json::object();
  json frequencies = json::object();
  for (const auto& [m, n] : stats.counts) {
    counts[std::string(to_string(m))] = n;
    frequencies[std::string(to_string(m))] = static_cast<double>(n) / static_cast<double>(stats.total);
  }
  json by_type = json::object();
  for (const auto& [m, s] : stats.diameter_by_type) {
    json entry{{"diameter", summary_json(s)}};
    if (auto it = stats.internal_count_by_type.find(m); it != stats.internal_count_by_type.end()) {
      entry["internal_count"] = summary_json(it->second);
    }
    by_type[std::string(to_string(m))] = std::move(entry);
  }
  json depth = json::object();
  for (const auto& [d, n] : stats.depth_histogram) depth[std::to_string(d)] = n;
  return json{{"total", stats.total},
              {"counts", std::move(counts)},
              {"frequencies", std::move(frequencies)},
              {"diameter_t12", optional_summary(stats.diameter_t12)},
              {"diameter_t3", optional_summary(stats.diameter_t3)},
              {"internal_count_t12", optional_summary(stats.internal_count_t12)},
              {"by_type", std::move(by_type)},
              {"depth_histogram", std::move(depth)}};
}

json generator_params_to_json(const GeneratorParams& p) {
  return json{{"type_prevalence", p.type_prevalence},
              {"outer_diameter", spec_json(p.outer_diameter)},
              {"t3_diameter", spec_json(p.t3_diameter)},
              {"internal_count", spec_json(p.internal_count)},
              {"t3_internal_count", {p.t3_internal_count.low, p.t3_internal_count.high}},
              {"child_diameter_fraction", {p.child_diameter_fraction.low, p.child_diameter_fraction.high}},
              {"t3_child_diameter_fraction", {p.t3_child_diameter_fraction.low, p.t3_child_diameter_fraction.high}},
              {"family", to_string(p.family)},
              {"seed", p.seed}};
}

GeneratorParams generator_params_from_json(const json& j) {
  if (!j.is_object()) fail("generator parameters must be an object");
  static const char* const kKnown[] = {"type_prevalence", "outer_diameter", "t3_diameter",
                                       "internal_count", "t3_internal_count", "child_diameter_fraction",
                                       "t3_child_diameter_fraction", "family", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      fail("unknown generator parameter '" + key + "'");
    }
  }
  GeneratorParams p;
  try {
    if (j.contains("type_prevalence")) p.type_prevalence = j["type_prevalence"].get<std::array<double, 4>>();
    if (j.contains("outer_diameter")) p.outer_diameter = spec_from(j["outer_diameter"], p.outer_diameter);
    if (j.contains("t3_diameter")) p.t3_diameter = spec_from(j["t3_diameter"], p.t3_diameter);
    if (j.contains("internal_count")) p.internal_count = spec_from(j["internal_count"], p.internal_count);
    if (j.contains("t3_internal_count")) {
      const auto r = j["t3_internal_count"].get<std::array<int, 2>>();
      p.t3_internal_count = CountRange{r[0], r[1]};
    }
    if (j.contains("child_diameter_fraction")) {
      const auto r = j["child_diameter_fraction"].get<std::array<double, 2>>();
      p.child_diameter_fraction = FractionRange{r[0], r[1]};
    }
    if (j.contains("t3_child_diameter_fraction")) {
      const auto r = j["t3_child_diameter_fraction"].get<std::array<double, 2>>();
      p.t3_child_diameter_fraction = FractionRange{r[0], r[1]};
    }
    if (j.contains("family")) p.family = enum_of<DistributionFamily>(j, "family", parse_distribution_family);
    if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  p.validate();
  return p;
}

}  // namespace liposim::json
