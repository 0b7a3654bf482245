#include <gtest/gtest.h>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "liposim/serialize_json.hpp"
#include "liposim/speclang/lower.hpp"
#include "liposim/speclang/parser.hpp"
#include "support.hpp"

namespace liposim::json {
namespace {

speclang::Scenario load(const std::string& name) {
  const std::string src = testing::read_file(testing::scenario_path(name));
  auto parsed = speclang::parse(src);
  EXPECT_TRUE(parsed.ok());
  auto lowered = speclang::lower(*parsed.ast, src);
  EXPECT_TRUE(lowered.scenario);
  return *lowered.scenario;
}

TEST(Json, StateRoundTrip) {
  for (const char* name : {"urease.psys", "fibonacci.psys"}) {
    const SystemState s = load(name).state;
    const json j = state_to_json(s);
    EXPECT_EQ(state_from_json(j), s) << name;
    EXPECT_EQ(state_from_json(json::parse(j.dump())), s) << name;
  }
}

TEST(Json, StateRoundTripAfterBurst) {
  auto sc = load("urease.psys");
  engine::run(sc.state, sc.config, sc.schedule, sc.atoms);
  EXPECT_EQ(state_from_json(json::parse(state_to_json(sc.state).dump())), sc.state);
}

TEST(Json, PopulationRoundTrip) {
  SpeciesTable species;
  const auto pop = sample_population(GeneratorParams{}, 50, 3);
  const json j = population_to_json(pop, species, json{{"seed", 3}});
  EXPECT_EQ(j.at("meta").at("seed"), 3);
  SpeciesTable read_species;
  EXPECT_EQ(population_from_json(j, read_species), pop);
  EXPECT_EQ(population_from_json(j.at("mvls"), read_species), pop);
}

TEST(Json, UnknownSpeciesPolicy) {
  SpeciesTable species;
  const json j = json{{"urea", 2.0}};
  EXPECT_THROW(mixture_from_json(j, species), InvalidArgument);
  const Mixture m = mixture_from_json(j, species, true);
  EXPECT_EQ(m[species.at("urea")], 2.0);
}

TEST(Json, MalformedInputs) {
  SpeciesTable species;
  EXPECT_THROW(population_from_json(json(42), species), InvalidArgument);
  EXPECT_THROW(population_from_json(json::parse(R"({"mvls": [{"morphology": "T9"}]})"), species), InvalidArgument);
  EXPECT_THROW(mixture_from_json(json{{"a", -1.0}}, species, true), InvalidArgument);
}

TEST(Json, DepthFourRejected) {
  SpeciesTable species;
  json c = json::parse(R"({"id": "m0", "depth": 1, "diameter": 60, "children": [
    {"id": "m0.0", "depth": 2, "diameter": 30, "children": [
      {"id": "m0.0.0", "depth": 3, "diameter": 12, "children": [
        {"id": "m0.0.0.0", "depth": 4, "diameter": 4}]}]}]})");
  json mvl = {{"morphology", "T1b"}, {"root", c}};
  EXPECT_ANY_THROW(population_from_json(json::array({mvl}), species));
}

TEST(Json, GeneratorParamsRoundTripAndStrictKeys) {
  GeneratorParams p;
  p.family = DistributionFamily::Lognormal;
  p.seed = 12;
  p.t3_internal_count = {16, 40};
  EXPECT_EQ(generator_params_from_json(generator_params_to_json(p)), p);
  EXPECT_EQ(generator_params_from_json(json::object()), GeneratorParams{});
  EXPECT_THROW(generator_params_from_json(json{{"prevalance", {1, 0, 0, 0}}}), InvalidArgument);
  EXPECT_THROW(generator_params_from_json(json{{"type_prevalence", {1, 1, 0, 0}}}), InvalidArgument);
}

TEST(Json, EventRoundTrip) {
  SpeciesTable species;
  const SpeciesId a = species.add(Species{"a", PermClass::Gas, {}});
  Event e{1.5, EventKind::Burst, "m0.1", 2, {}, "note"};
  e.payload.set(a, 3.25);
  EXPECT_EQ(event_from_json(event_to_json(e, species), species), e);
}

TEST(Json, StatsCarryMeasuredColumns) {
  const auto pop = sample_population(GeneratorParams{}, 100, 1);
  const json j = stats_to_json(population_stats(pop));
  EXPECT_EQ(j.at("total"), 100);
  for (const char* key : {"diameter_t12", "diameter_t3", "internal_count_t12", "frequencies", "depth_histogram"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

}  // namespace
}  // namespace liposim::json
