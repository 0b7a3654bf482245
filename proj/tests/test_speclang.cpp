#include <gtest/gtest.h>

#include <filesystem>

#include "liposim/population.hpp"
#include "liposim/speclang/lower.hpp"
#include "liposim/speclang/parser.hpp"
#include "liposim/speclang/serialize.hpp"
#include "support.hpp"

namespace liposim::speclang {
namespace {

constexpr const char* kMinimal = R"(system tiny mode abstract
species a class small_polar
compartment m0 diameter 65 um { contents { a: 1 } }
rule r: a -> a + a
)";

std::string messages(const ParseResult& r) {
  std::string out;
  for (const auto& d : r.diagnostics) out += format_diagnostic(d, "input") + "\n";
  return out;
}

const Diagnostic* find_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds) {
    if (d.message.find(needle) != std::string::npos) return &d;
  }
  return nullptr;
}

std::vector<std::string> shipped_scenarios() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(LIPOSIM_SOURCE_DIR) + "/scenarios")) {
    if (e.path().extension() == ".psys") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Parse, MinimalScenario) {
  const auto r = parse(kMinimal);
  ASSERT_TRUE(r.ok()) << messages(r);
  const ScenarioAst& ast = *r.ast;
  EXPECT_EQ(ast.name, "tiny");
  EXPECT_EQ(ast.mode, Mode::Abstract);
  ASSERT_EQ(ast.compartments.size(), 1u);
  EXPECT_EQ(ast.compartments[0].diameter, 65.0);
  ASSERT_EQ(ast.rules.size(), 1u);
  EXPECT_EQ(ast.rules[0].products.size(), 2u);
}

TEST(Parse, MisspelledSpeciesNamedWithLine) {
  const std::string src = R"(system s mode kinetic
species urea class small_polar
species urease class macromolecule
compartment m0 diameter 65 um {}
rule h: urea -> none catalyst urase
)";
  const auto r = parse(src);
  ASSERT_FALSE(r.ok());
  const Diagnostic* d = find_message(r.diagnostics, "urase");
  ASSERT_NE(d, nullptr) << messages(r);
  EXPECT_EQ(d->line, 5);
  EXPECT_TRUE(testing::positioned(*d, src));
}

TEST(Parse, DepthFourIsSemanticError) {
  const std::string src = R"(system deep mode abstract
species a class small_polar
compartment m0 diameter 80 um {
  compartment m0.1 diameter 30 um {
    compartment m0.1.1 diameter 10 um {
      compartment m0.1.1.1 diameter 3 um {}
    }
  }
}
)";
  const auto r = parse(src);
  ASSERT_FALSE(r.ok());
  const Diagnostic* d = find_message(r.diagnostics, "depth 4");
  ASSERT_NE(d, nullptr) << messages(r);
  EXPECT_NE(d->message.find("3"), std::string::npos);
  EXPECT_EQ(d->line, 6);
}

TEST(Parse, UnitsAreMandatory) {
  const auto r = parse("system s mode abstract\nspecies a class gas\ncompartment m0 diameter 65 {}\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].line, 3);
}

TEST(Parse, ModeRestrictions) {
  const auto r = parse(R"(system s mode abstract
species a class small_polar
compartment m0 diameter 65 um {}
rule r: a -> none kinetics mass_action(k=1)
)");
  EXPECT_FALSE(r.ok());
}

TEST(Parse, TrackedErrorRecovery) {
  // Two independent mistakes, both reported.
  const auto r = parse(R"(system s mode abstract
species a clas small_polar
species b class small_polar
compartment m0 diameter oops um {}
)");
  ASSERT_FALSE(r.ok());
  EXPECT_GE(r.diagnostics.size(), 2u) << messages(r);
  EXPECT_EQ(r.diagnostics[0].line, 2);
}

TEST(Parse, InterventionsAndTargets) {
  const std::string src = R"(system s mode kinetic
species u class small_polar
species na class ionic
compartment m0 diameter 65 um { compartment m0.1 diameter 10 um {} }
compartment m1 diameter 40 um {}
rule r: u -> na@out + u @in kinetics mass_action(k=0.5)
at 1 s do electroporate m0 2 s 100
at 2 s do inject m0.1 na 5 amol
at 3 s do insert_channel m0.1 na 0.5 um/s
at 4 s do dc_pulse m0, m1
)";
  const auto r = parse(src);
  ASSERT_TRUE(r.ok()) << messages(r);
  const RuleDecl& rule = r.ast->rules[0];
  EXPECT_EQ(rule.products[0].target, Target::Out);
  EXPECT_FALSE(rule.products[1].target);
  EXPECT_EQ(rule.default_target, Target::In);
  ASSERT_EQ(r.ast->interventions.size(), 4u);
  EXPECT_EQ(std::get<DcPulseDecl>(r.ast->interventions[3].op).targets, (std::vector<std::string>{"m0", "m1"}));
}

TEST(Parse, InterventionTimesMustNotDecrease) {
  const auto r = parse(R"(system s mode kinetic
species u class small_polar
compartment m0 diameter 65 um {}
at 5 s do dc_pulse m0
at 1 s do dc_pulse m0
)");
  EXPECT_FALSE(r.ok());
}

TEST(Parse, NestingBombIsBounded) {
  std::string src = "system s mode abstract\ncompartment m0 diameter 1 um ";
  src += std::string(100000, '{');
  const auto r = parse(src);
  EXPECT_FALSE(r.ok());
  for (const auto& d : r.diagnostics) EXPECT_TRUE(testing::positioned(d, src));
}

TEST(Parse, EmptyAndGarbageInputs) {
  for (const std::string src : {std::string{}, std::string("\xff\xfe"), std::string("}}}}"),
                                std::string("system"), std::string(1, '\0')}) {
    const auto r = parse(src);
    EXPECT_FALSE(r.ok());
    ASSERT_FALSE(r.diagnostics.empty());
    for (const auto& d : r.diagnostics) EXPECT_TRUE(testing::positioned(d, src)) << d.message;
  }
}

TEST(RoundTrip, ShippedScenarios) {
  const auto files = shipped_scenarios();
  ASSERT_GE(files.size(), 2u);
  for (const auto& path : files) {
    const std::string src = testing::read_file(path);
    const auto first = parse(src);
    ASSERT_TRUE(first.ok()) << path << "\n" << messages(first);
    const std::string text = serialize(*first.ast);
    const auto second = parse(text);
    ASSERT_TRUE(second.ok()) << path << "\n" << text << messages(second);
    EXPECT_EQ(*second.ast, *first.ast) << path;
    EXPECT_EQ(serialize(*second.ast), text) << path;
  }
}

TEST(RoundTrip, DefaultsAreOmitted) {
  const auto r = parse(kMinimal);
  ASSERT_TRUE(r.ok());
  const std::string text = serialize(*r.ast);
  for (const char* absent : {"priority", "morphology", "run", "perm ", "catalyst", "@"}) {
    EXPECT_EQ(text.find(absent), std::string::npos) << absent << "\n" << text;
  }
}

TEST(RoundTrip, EveryConstruct) {
  const std::string src = R"(system full mode kinetic
species urea class small_polar perm 0.05 um/s
species CO2 class gas
species NH3 class small_polar
species urease class macromolecule
species mag class particle
permeability ionic 0.001 um/s
atom N { urea: 2, NH3: 1 }
environment volume 1e6 fL { urea: 100 mM }
generator {
  n = 3
  seed = 4
  prevalence = 0.5 0.5 0 0
  outer_diameter = 60 20 30 90 um
  t3_diameter = 120 30 80 200 um
  internal_count = 3 1 1 6
  t3_internal_count = 15 20
  child_fraction = 0.1 0.3
  t3_child_fraction = 0.05 0.1
  family = lognormal
}
swelling { urease: 0.001 mM, mag: 1 mM }
rule h: urea -> CO2 + 2 NH3 catalyst urease kinetics mm(kcat=10000, km=3 mM, enzyme=urease)
rule leak: NH3 -> NH3@out kinetics mass_action(k=0.25)
indicator NH3 above 1 mM
at 0.5 s do electroporate m0 1 s 10
at 1 s do inject m1 urea 2.5 amol
at 1.5 s do insert_channel m1 NH3 0.2 um/s
at 2 s do dc_pulse m0, m2
run {
  dt = 0.005 s
  steps = 100
  seed = 9
  sample_every = 10
  burst_ratio = 1.08
  gas_factor = 0.03 fL/amol
  solver = euler
}
)";
  const auto r = parse(src);
  ASSERT_TRUE(r.ok()) << messages(r);
  const std::string text = serialize(*r.ast);
  const auto again = parse(text);
  ASSERT_TRUE(again.ok()) << text << messages(again);
  EXPECT_EQ(*again.ast, *r.ast);
  EXPECT_EQ(serialize(*again.ast), text);
  EXPECT_TRUE(lower(*r.ast, src).scenario);
}

TEST(Lower, GeneratorMatchesSampler) {
  const std::string src = R"(system g mode abstract
generator { n = 1 seed = 7 }
)";
  const auto r = parse(src);
  ASSERT_TRUE(r.ok()) << messages(r);
  const auto lowered = lower(*r.ast, src);
  ASSERT_TRUE(lowered.scenario);
  Rng rng = derive_stream(7, 0);
  ASSERT_EQ(lowered.scenario->state.mvls.size(), 1u);
  EXPECT_EQ(lowered.scenario->state.mvls[0], sample_mvl(GeneratorParams{}, rng, "m0"));
}

TEST(Lower, ParticleInInnerCompartmentWarns) {
  const std::string src = R"(system p mode kinetic
species mag class particle
compartment m0 diameter 65 um {
  compartment m0.1 diameter 10 um { contents { mag: 1 mM } }
}
)";
  const auto r = parse(src);
  ASSERT_TRUE(r.ok()) << messages(r);
  const auto lowered = lower(*r.ast, src);
  ASSERT_TRUE(lowered.scenario);
  const Diagnostic* d = find_message(lowered.diagnostics, "mag");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->severity, Severity::Warning);
  EXPECT_EQ(d->line, 4);
}

TEST(Lower, KineticContentsAreConcentrations) {
  const std::string src = R"(system c mode kinetic
species u class small_polar
environment volume 1000 fL { u: 2 mM }
compartment m0 diameter 10 um { contents { u: 3 mM } }
)";
  const auto r = parse(src);
  ASSERT_TRUE(r.ok()) << messages(r);
  const auto sc = *lower(*r.ast, src).scenario;
  const SpeciesId u = sc.state.species.at("u");
  EXPECT_DOUBLE_EQ(sc.state.environment.contents[u], 2000.0);
  EXPECT_NEAR(sc.state.mvls[0].root.contents[u] / sc.state.mvls[0].root.volume, 3.0, 1e-12);
  EXPECT_FALSE(sc.state.environment.unbounded);
}

TEST(Lower, EnzymeBecomesCatalyst) {
  const auto sc = [] {
    const std::string src = testing::read_file(testing::scenario_path("urease.psys"));
    return *lower(*parse(src).ast, src).scenario;
  }();
  ASSERT_EQ(sc.state.rules.size(), 1u);
  ASSERT_EQ(sc.state.rules[0].catalysts.size(), 1u);
  EXPECT_EQ(sc.state.rules[0].catalysts[0].species, sc.state.species.at("urease"));
}

TEST(Fuzz, MutatedScenariosNeverCrash) {
  std::vector<std::string> seeds{kMinimal};
  for (const auto& path : shipped_scenarios()) seeds.push_back(testing::read_file(path));
  Rng rng = derive_stream(123, 0);
  for (int i = 0; i < 2000; ++i) {
    const std::string src = testing::mutate(seeds[uniform_index(rng, seeds.size())], rng);
    const auto r = parse(src);
    if (!r.ok()) ASSERT_FALSE(r.diagnostics.empty());
    for (const auto& d : r.diagnostics) ASSERT_TRUE(testing::positioned(d, src)) << d.message << "\n" << src;
    if (r.ok()) {
      const auto lowered = lower(*r.ast, src);
      for (const auto& d : lowered.diagnostics) ASSERT_TRUE(testing::positioned(d, src)) << d.message;
    }
  }
}

TEST(Diagnostics, FormatHasCaret) {
  Diagnostic d = make_diagnostic(Severity::Error, SourceLoc{2, 3}, "boom", "line one\nab cd\n");
  EXPECT_EQ(d.excerpt, "ab cd");
  const std::string text = format_diagnostic(d, "f.psys");
  EXPECT_NE(text.find("f.psys:2:3: error: boom"), std::string::npos);
  EXPECT_NE(text.find("\n  ab cd\n    ^"), std::string::npos) << text;
}

}  // namespace
}  // namespace liposim::speclang
