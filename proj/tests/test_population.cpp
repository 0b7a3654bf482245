#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "liposim/geometry.hpp"
#include "liposim/population.hpp"
#include "support.hpp"

namespace liposim {
namespace {

GeneratorParams degenerate_t1a() {
  GeneratorParams p;
  p.type_prevalence = {1.0, 0.0, 0.0, 0.0};
  p.outer_diameter = {65.0, 0.0, 65.0, 65.0};
  p.internal_count = {1.0, 0.0, 1.0, 1.0};
  return p;
}

TEST(Population, DegenerateParamsGiveOneChildT1a) {
  Rng rng = derive_stream(0, 0);
  const Mvl m = sample_mvl(degenerate_t1a(), rng);
  EXPECT_EQ(m.morphology, Morphology::T1a);
  EXPECT_EQ(m.root.diameter, 65.0);
  EXPECT_EQ(tree_height(m.root), 2);
  ASSERT_EQ(m.root.children.size(), 1u);
  EXPECT_EQ(m.root.children[0].id, "m0.0");
  EXPECT_NO_THROW(m.validate());
}

TEST(Population, SameSeedSameTree) {
  GeneratorParams p;
  Rng a = derive_stream(17, 3), b = derive_stream(17, 3);
  EXPECT_EQ(sample_mvl(p, a), sample_mvl(p, b));
}

TEST(Population, SingleItemBatchUsesStreamZero) {
  GeneratorParams p;
  Rng rng = derive_stream(7, 0);
  const auto batch = sample_population(p, 1, 7);
  ASSERT_EQ(batch.size(), 1u);
  EXPECT_EQ(batch[0], sample_mvl(p, rng, "m0"));
}

TEST(Population, ThreadCountDoesNotChangeResult) {
  GeneratorParams p;
  const auto one = sample_population(p, 500, 99, 1);
  EXPECT_EQ(one, sample_population(p, 500, 99, 4));
  EXPECT_EQ(one, sample_population(p, 500, 99, 3));
}

TEST(Population, ItemIdsAreIndexed) {
  const auto batch = sample_population(GeneratorParams{}, 12, 1);
  for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(batch[i].id(), "m" + std::to_string(i));
}

TEST(Population, GeneratedTreesKeepInvariants) {
  const GeneratorParams p;
  const auto batch = sample_population(p, 3000, 5);
  for (const Mvl& m : batch) {
    ASSERT_NO_THROW(m.validate());
    const int h = tree_height(m.root);
    ASSERT_LE(h, kMaxDepth);
    ASSERT_EQ(h, m.morphology == Morphology::T1b ? 3 : 2);
    ASSERT_NEAR(m.root.volume, sphere_volume(m.root.diameter), 1e-9 * m.root.volume);
    double used = 0.0;
    for (const auto& c : m.root.children) used += c.volume;
    ASSERT_LE(used, kPackingHeadroom * m.root.volume * (1 + 1e-12));
    ASSERT_TRUE(m.root.contents.empty());
    if (m.morphology == Morphology::T3) {
      ASSERT_GE(m.root.diameter, 69.97);
      ASSERT_LE(m.root.diameter, 246.18);
      ASSERT_GE(m.root.children.size(), 15u);
      ASSERT_LE(m.root.children.size(), 50u);
    } else {
      ASSERT_GE(m.root.diameter, 17.39);
      ASSERT_LE(m.root.diameter, 173.50);
      ASSERT_GE(m.root.children.size(), 1u);
      ASSERT_LE(m.root.children.size(), 14u);
    }
    if (m.morphology == Morphology::T1b) {
      const auto with_kids = std::count_if(m.root.children.begin(), m.root.children.end(),
                                           [](const Compartment& c) { return !c.children.empty(); });
      ASSERT_EQ(with_kids, 1);
    }
  }
}

TEST(Population, FrequenciesByDirectCounting) {
  const auto batch = sample_population(GeneratorParams{}, 10000, 2);
  const std::array<Morphology, 4> types{Morphology::T1a, Morphology::T1b, Morphology::T2, Morphology::T3};
  const std::array<double, 4> target{0.72, 0.12, 0.08, 0.08};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto n = std::count_if(batch.begin(), batch.end(), [&](const Mvl& m) { return m.morphology == types[k]; });
    EXPECT_NEAR(static_cast<double>(n) / 10000.0, target[k], 0.015) << to_string(types[k]);
  }
}

TEST(Population, PackingFailureIsReported) {
  GeneratorParams p = degenerate_t1a();
  p.internal_count = {14.0, 0.0, 14.0, 14.0};
  p.child_diameter_fraction = {0.9, 0.95};
  Rng rng = derive_stream(0, 0);
  EXPECT_THROW(sample_mvl(p, rng), GenerationError);
  try {
    sample_population(p, 3, 0);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("m0"), std::string::npos);
  }
}

TEST(Population, ParamsValidation) {
  GeneratorParams p;
  EXPECT_NO_THROW(p.validate());
  p.type_prevalence = {0.5, 0.5, 0.1, 0.0};
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = GeneratorParams{};
  p.outer_diameter.mean = 500.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = GeneratorParams{};
  p.t3_internal_count = {10, 5};
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = GeneratorParams{};
  p.child_diameter_fraction = {0.5, 0.2};
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Stats, SingleT1a) {
  Rng rng = derive_stream(0, 0);
  const std::vector<Mvl> pop{sample_mvl(degenerate_t1a(), rng)};
  const PopulationStats s = population_stats(pop);
  ASSERT_TRUE(s.diameter_t12);
  EXPECT_EQ(s.diameter_t12->mean, 65.0);
  EXPECT_EQ(s.diameter_t12->sd, 0.0);
  EXPECT_EQ(s.diameter_t12->min, 65.0);
  EXPECT_EQ(s.diameter_t12->max, 65.0);
  ASSERT_TRUE(s.internal_count_t12);
  EXPECT_EQ(s.internal_count_t12->mean, 1.0);
  EXPECT_EQ(s.internal_count_t12->sd, 0.0);
  EXPECT_EQ(s.internal_count_t12->min, 1.0);
  EXPECT_EQ(s.internal_count_t12->max, 1.0);
  EXPECT_FALSE(s.diameter_t3);
  EXPECT_EQ(s.counts.at(Morphology::T1a), 1u);
  EXPECT_EQ(s.depth_histogram.at(2), 1u);
}

TEST(Stats, EmptyPopulationThrows) {
  EXPECT_THROW(population_stats(std::span<const Mvl>{}), InvalidArgument);
}

TEST(Stats, MinMaxBracketEverySample) {
  const auto pop = sample_population(GeneratorParams{}, 2000, 8);
  const PopulationStats s = population_stats(pop);
  for (const Mvl& m : pop) {
    const Summary& d = m.morphology == Morphology::T3 ? *s.diameter_t3 : *s.diameter_t12;
    ASSERT_GE(m.root.diameter, d.min);
    ASSERT_LE(m.root.diameter, d.max);
  }
  std::size_t total = 0;
  for (const auto& [m, n] : s.counts) total += n;
  EXPECT_EQ(total, pop.size());
}

TEST(Stats, SummaryMatchesDirectComputation) {
  const std::vector<double> xs{1.0, 2.0, 4.0, 7.0};
  const auto s = summarize(xs);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->mean, 3.5);
  // Sample variance: (6.25 + 2.25 + 0.25 + 12.25) / 3 = 7.
  EXPECT_DOUBLE_EQ(s->sd, std::sqrt(7.0));
  EXPECT_FALSE(summarize(std::vector<double>{}));
}

TEST(Stats, TableHasMeasuredRows) {
  const auto pop = sample_population(GeneratorParams{}, 200, 8);
  const std::string table = format_stats_table(population_stats(pop));
  for (const char* row : {"Mean", "St. Dev.", "Range"}) EXPECT_NE(table.find(row), std::string::npos) << row;
}

TEST(Stats, InjectionLeavesStatsUnchanged) {
  SystemState s;
  s.mode = Mode::Kinetic;
  const SpeciesId urease = s.species.add(Species{"urease", PermClass::Macromolecule, {}});
  s.mvls = sample_population(GeneratorParams{}, 50, 4);
  const PopulationStats before = population_stats(s.mvls);
  engine::microinject(s, s.mvls[3].root.children[0].id, urease, 5.0);
  const PopulationStats after = population_stats(s.mvls);
  EXPECT_EQ(before.counts, after.counts);
  EXPECT_EQ(before.diameter_t12->mean, after.diameter_t12->mean);
  EXPECT_EQ(before.internal_count_t12->mean, after.internal_count_t12->mean);
  EXPECT_EQ(before.depth_histogram, after.depth_histogram);
}

struct Swelling : ::testing::Test {
  SpeciesTable species;
  SpeciesId sucrose = species.add(Species{"sucrose", PermClass::Macromolecule, {}});
  SpeciesId magnetite = species.add(Species{"magnetite", PermClass::Particle, {}});
  Mvl t1b = [] {
    GeneratorParams p = degenerate_t1a();
    p.type_prevalence = {0.0, 1.0, 0.0, 0.0};
    p.internal_count = {2.0, 0.0, 2.0, 2.0};
    Rng rng = derive_stream(0, 0);
    return sample_mvl(p, rng);
  }();
};

TEST_F(Swelling, EveryCompartmentAtSucroseConcentration) {
  ASSERT_EQ(tree_height(t1b.root), 3);
  const Mvl m = embed_swelling_solution(t1b, {{sucrose, 300.0}}, species, Mode::Kinetic);
  int visited = 0;
  for_each_compartment(m.root, [&](const Compartment& c) {
    EXPECT_NEAR(c.contents[sucrose] / c.volume, 300.0, 1e-12);
    ++visited;
  });
  EXPECT_GE(visited, 4);
}

TEST_F(Swelling, ParticlesOnlyInOutermost) {
  const Mvl m = embed_swelling_solution(t1b, {{magnetite, 10.0}}, species, Mode::Kinetic);
  EXPECT_GT(m.root.contents[magnetite], 0.0);
  for (const auto& child : m.root.children) {
    for_each_compartment(child, [&](const Compartment& c) { EXPECT_EQ(c.contents[magnetite], 0.0); });
  }
}

TEST_F(Swelling, EmptyMapAndIdempotence) {
  EXPECT_EQ(embed_swelling_solution(t1b, {}, species, Mode::Kinetic), t1b);
  const Mvl once = embed_swelling_solution(t1b, {{sucrose, 300.0}}, species, Mode::Kinetic);
  EXPECT_EQ(embed_swelling_solution(once, {{sucrose, 300.0}}, species, Mode::Kinetic), once);
}

TEST_F(Swelling, Errors) {
  EXPECT_THROW(embed_swelling_solution(t1b, {{sucrose, 1.0}}, species, Mode::Abstract), ModeError);
  EXPECT_THROW(embed_swelling_solution(t1b, {{SpeciesId{9}, 1.0}}, species, Mode::Kinetic), UnknownIdError);
  EXPECT_THROW(embed_swelling_solution(t1b, {{sucrose, -1.0}}, species, Mode::Kinetic), InvalidArgument);
}

}  // namespace
}  // namespace liposim
