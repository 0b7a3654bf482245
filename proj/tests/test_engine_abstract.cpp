#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "liposim/engine.hpp"
#include "liposim/error.hpp"
#include "support.hpp"

namespace liposim::engine {
namespace {

using testing::single;

struct Abstract : ::testing::Test {
  SystemState s;
  SpeciesId a, b, c;

  Abstract() {
    s.mode = Mode::Abstract;
    s.environment.unbounded = false;
    a = s.species.add(Species{"a", PermClass::SmallPolar, {}});
    b = s.species.add(Species{"b", PermClass::SmallPolar, {}});
    c = s.species.add(Species{"c", PermClass::SmallPolar, {}});
  }

  Compartment& root() { return s.mvls.at(0).root; }

  void one_compartment(double na) {
    Compartment r = Compartment::sphere("m0", 1, 65.0);
    r.contents.set(a, na);
    s.mvls.push_back(single(std::move(r)));
  }

  void with_children(int n) {
    Compartment r = Compartment::sphere("m0", 1, 65.0);
    for (int i = 0; i < n; ++i) r.children.push_back(Compartment::sphere("m0." + std::to_string(i), 2, 10.0));
    s.mvls.push_back(single(std::move(r), Morphology::T1a));
  }

  void rule(std::string name, std::vector<Term> in, std::vector<Product> out, std::vector<Term> cat = {},
            int priority = 0) {
    s.rules.push_back(Rule{std::move(name), std::move(in), std::move(cat), std::move(out), AbstractLaw{priority}});
  }
};

TEST_F(Abstract, ApplicableDefinition) {
  Rule r{"r", {{a, 1}}, {}, {{b, 1, Target::Here}}, AbstractLaw{}};
  Mixture m;
  EXPECT_FALSE(applicable(r, m, false));
  m.set(a, 1);
  m.set(b, 7);
  EXPECT_TRUE(applicable(r, m, false));
  r.products[0].target = Target::In;
  EXPECT_FALSE(applicable(r, m, false));
  EXPECT_TRUE(applicable(r, m, true));
  r.catalysts.push_back(Term{c, 1});
  EXPECT_FALSE(applicable(r, m, true));
}

TEST_F(Abstract, NoRuleApplicableHalts) {
  one_compartment(0);
  rule("grow", {{a, 1}}, {{b, 1}});
  const SystemState before = s;
  Rng rng(1);
  const StepReport rep = maximal_step(s, rng);
  EXPECT_TRUE(rep.halted);
  EXPECT_TRUE(rep.applications.empty());
  EXPECT_EQ(s, before);
}

TEST_F(Abstract, FibonacciBySteps) {
  one_compartment(1);
  rule("grow", {{a, 1}}, {{b, 1}});
  rule("split", {{b, 1}}, {{a, 1}, {b, 1}});
  // (a, b) per step, enumerated by hand.
  const std::vector<std::pair<int, int>> expected{{0, 1}, {1, 1}, {1, 2}, {2, 3}, {3, 5}, {5, 8}};
  Rng rng(0);
  for (const auto& [ea, eb] : expected) {
    maximal_step(s, rng);
    EXPECT_EQ(root().contents[a], ea);
    EXPECT_EQ(root().contents[b], eb);
  }
}

TEST_F(Abstract, FourStepsGiveFive) {
  one_compartment(1);
  rule("grow", {{a, 1}}, {{b, 1}});
  rule("split", {{b, 1}}, {{a, 1}, {b, 1}});
  Rng rng(4);
  for (int i = 0; i < 4; ++i) maximal_step(s, rng);
  EXPECT_EQ(root().contents[a] + root().contents[b], 5.0);
}

TEST_F(Abstract, CompetingRulesBothReachable) {
  one_compartment(1);
  rule("to_b", {{a, 1}}, {{b, 1}});
  rule("to_c", {{a, 1}}, {{c, 1}});
  std::set<std::pair<double, double>> outcomes;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    SystemState copy = s;
    Rng rng(seed);
    maximal_step(copy, rng);
    const Compartment& r = copy.mvls[0].root;
    EXPECT_EQ(r.contents[a], 0.0);
    EXPECT_EQ(r.contents[b] + r.contents[c], 1.0);
    outcomes.emplace(r.contents[b], r.contents[c]);
  }
  EXPECT_EQ(outcomes, (std::set<std::pair<double, double>>{{1.0, 0.0}, {0.0, 1.0}}));
}

TEST_F(Abstract, CatalystIsBoundPerApplication) {
  one_compartment(5);
  root().contents.set(c, 2);
  rule("cat", {{a, 1}}, {{b, 1}}, {{c, 1}});
  Rng rng(0);
  const StepReport rep = maximal_step(s, rng);
  EXPECT_EQ(rep.applications.size(), 2u);
  EXPECT_EQ(root().contents[a], 3.0);
  EXPECT_EQ(root().contents[b], 2.0);
  EXPECT_EQ(root().contents[c], 2.0);
}

TEST_F(Abstract, HigherPriorityFiresFirst) {
  one_compartment(3);
  rule("low", {{a, 1}}, {{b, 1}}, {}, 0);
  rule("high", {{a, 1}}, {{c, 1}}, {}, 5);
  Rng rng(0);
  maximal_step(s, rng);
  EXPECT_EQ(root().contents[c], 3.0);
  EXPECT_EQ(root().contents[b], 0.0);
}

TEST_F(Abstract, OutTargetReachesEnvironment) {
  one_compartment(2);
  rule("leave", {{a, 1}}, {{b, 1, Target::Out}});
  Rng rng(0);
  maximal_step(s, rng);
  EXPECT_EQ(s.environment.contents[b], 2.0);
  EXPECT_EQ(root().contents[b], 0.0);
}

TEST_F(Abstract, InTargetReachesChildren) {
  with_children(3);
  root().contents.set(a, 300);
  rule("enter", {{a, 1}}, {{b, 1, Target::In}});
  Rng rng(2);
  maximal_step(s, rng);
  double total = 0.0;
  for (const auto& ch : root().children) {
    EXPECT_GT(ch.contents[b], 0.0);
    total += ch.contents[b];
  }
  EXPECT_EQ(total, 300.0);
}

TEST_F(Abstract, InTargetNeedsAChild) {
  one_compartment(2);
  rule("enter", {{a, 1}}, {{b, 1, Target::In}});
  Rng rng(0);
  EXPECT_TRUE(maximal_step(s, rng).halted);
}

TEST_F(Abstract, KineticStateRejected) {
  one_compartment(1);
  s.mode = Mode::Kinetic;
  Rng rng(0);
  EXPECT_THROW(maximal_step(s, rng), ModeError);
}

TEST_F(Abstract, RunReportsFibonacciTotals) {
  one_compartment(1);
  rule("grow", {{a, 1}}, {{b, 1}});
  rule("split", {{b, 1}}, {{a, 1}, {b, 1}});
  RunConfig cfg;
  cfg.abstract.max_steps = 10;
  const Trace t = run(s, cfg);
  ASSERT_EQ(t.samples.size(), 11u);
  const std::vector<double> fib{1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  for (std::size_t i = 0; i < fib.size(); ++i) EXPECT_EQ(t.samples[i].total_objects(), fib[i]) << i;
  EXPECT_EQ(t.halt, HaltReason::MaxSteps);
}

TEST_F(Abstract, RunHaltsWhenNothingApplies) {
  one_compartment(3);
  rule("to_b", {{a, 1}}, {{b, 1}});
  RunConfig cfg;
  const Trace t = run(s, cfg);
  EXPECT_EQ(t.halt, HaltReason::Halt);
  EXPECT_EQ(root().contents[b], 3.0);
}

TEST_F(Abstract, RunIsDeterministic) {
  with_children(2);
  root().contents.set(a, 20);
  rule("to_b", {{a, 1}}, {{b, 1, Target::In}});
  rule("to_c", {{a, 2}}, {{c, 1, Target::Out}});
  RunConfig cfg;
  cfg.abstract.rng_seed = 5;
  SystemState s1 = s, s2 = s;
  std::ostringstream o1, o2;
  write_trace_csv(o1, run(s1, cfg));
  write_trace_csv(o2, run(s2, cfg));
  EXPECT_EQ(o1.str(), o2.str());
  EXPECT_EQ(s1, s2);
}

// Re-checks every rule against every residual after the step.
TEST(Maximality, RandomSystemsLeaveNothingApplicable) {
  Rng gen = derive_stream(2024, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    SystemState s = testing::random_abstract_system(gen);
    Rng rng = derive_stream(trial, 1);
    for (int step = 0; step < 3; ++step) {
      const StepReport rep = maximal_step(s, rng);
      for (const auto& [id, residual] : rep.residual) {
        const Compartment* c = s.find_compartment(id);
        ASSERT_NE(c, nullptr);
        const bool kid = std::any_of(c->children.begin(), c->children.end(),
                                     [](const Compartment& k) { return k.membrane_intact; });
        for (const Rule& r : s.rules) ASSERT_FALSE(applicable(r, residual, kid)) << "trial " << trial;
      }
      ASSERT_NO_THROW(s.validate());
      ASSERT_TRUE(s.mvls[0].root.contents.is_integral());
      if (rep.halted) break;
    }
  }
}

}  // namespace
}  // namespace liposim::engine
