#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "liposim/audit.hpp"
#include "liposim/error.hpp"
#include "liposim/geometry.hpp"
#include "liposim/permeability.hpp"
#include "liposim/random.hpp"
#include "liposim/types.hpp"
#include "support.hpp"

namespace liposim {
namespace {

TEST(Geometry, SphereVolumeOfTypicalMvl) {
  // pi/6 * 65^3 by hand.
  const double expected = 3.14159265358979 / 6.0 * 65.0 * 65.0 * 65.0;
  EXPECT_NEAR(sphere_volume(65.0), expected, 1e-9 * expected);
  EXPECT_NEAR(sphere_volume(65.0) / 1e5, 1.43793, 5e-6);
}

TEST(Geometry, UnitVolumeDiameter) { EXPECT_NEAR(sphere_volume(1.2407), 1.0000, 5e-5); }

TEST(Geometry, NonpositiveDiameterThrows) {
  EXPECT_THROW(sphere_volume(0.0), InvalidArgument);
  EXPECT_THROW(sphere_volume(-1.0), InvalidArgument);
  EXPECT_THROW(sphere_area(0.0), InvalidArgument);
}

TEST(Geometry, DiameterInvertsVolume) {
  for (double d : {0.5, 6.0, 65.0, 246.18}) EXPECT_NEAR(sphere_diameter(sphere_volume(d)), d, 1e-12 * d);
}

TEST(Geometry, AreaFormula) { EXPECT_NEAR(sphere_area(2.0), 4.0 * kPi, 1e-12); }

TEST(Permeability, DefaultsByClass) {
  EXPECT_EQ(default_permeability(PermClass::Ionic), 0.0);
  EXPECT_EQ(default_permeability(PermClass::Macromolecule), 0.0);
  EXPECT_EQ(default_permeability(PermClass::Particle), 0.0);
  EXPECT_DOUBLE_EQ(default_permeability(PermClass::SmallPolar), 0.04);
  EXPECT_GT(default_permeability(PermClass::Gas), default_permeability(PermClass::SmallPolar));
}

TEST(Permeability, TableOverridesEntry) {
  PermeabilityTable t;
  EXPECT_DOUBLE_EQ(t.get(PermClass::SmallPolar), 0.04);
  t.set(PermClass::Ionic, 0.5);
  EXPECT_DOUBLE_EQ(t.get(PermClass::Ionic), 0.5);
  EXPECT_THROW(t.set(PermClass::Ionic, -1.0), InvalidArgument);
}

TEST(Names, RoundTripEveryEnum) {
  for (auto m : {Mode::Abstract, Mode::Kinetic}) EXPECT_EQ(parse_mode(to_string(m)), m);
  for (auto c : {PermClass::Gas, PermClass::SmallPolar, PermClass::Lipophilic, PermClass::Ionic,
                 PermClass::Macromolecule, PermClass::Particle}) {
    EXPECT_EQ(parse_perm_class(to_string(c)), c);
  }
  for (auto m : {Morphology::T1a, Morphology::T1b, Morphology::T2, Morphology::T3, Morphology::Plain}) {
    EXPECT_EQ(parse_morphology(to_string(m)), m);
  }
  for (auto t : {Target::Here, Target::Out, Target::In}) EXPECT_EQ(parse_target(to_string(t)), t);
  for (auto k : {EventKind::Burst, EventKind::DcLysis, EventKind::ElectroporationOpen,
                 EventKind::ElectroporationClose, EventKind::Halt, EventKind::Injection}) {
    EXPECT_EQ(parse_event_kind(to_string(k)), k);
  }
  EXPECT_FALSE(parse_mode("quantum"));
}

TEST(SpeciesTable, AddAndFind) {
  SpeciesTable t;
  const SpeciesId a = t.add(Species{"a", PermClass::Gas, {}});
  const SpeciesId b = t.add(Species{"b", PermClass::Ionic, 0.3});
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("b"), b);
  EXPECT_EQ(*t.find("a"), a);
  EXPECT_FALSE(t.find("c"));
  EXPECT_THROW(t.at("c"), UnknownIdError);
  EXPECT_THROW(t.add(Species{"a", PermClass::Gas, {}}), InvalidArgument);
  EXPECT_THROW(t.add(Species{"d", PermClass::Gas, -1.0}), InvalidArgument);
}

TEST(Mixture, SparseReadsAndEquality) {
  Mixture m;
  EXPECT_TRUE(m.empty());
  EXPECT_EQ(m[SpeciesId{7}], 0.0);
  m.set(SpeciesId{3}, 2.0);
  m.add(SpeciesId{3}, 1.0);
  EXPECT_EQ(m[SpeciesId{3}], 3.0);
  Mixture n;
  n.set(SpeciesId{3}, 3.0);
  n.set(SpeciesId{9}, 0.0);
  EXPECT_EQ(m, n);
  EXPECT_TRUE(m.is_integral());
  m.set(SpeciesId{1}, 0.5);
  EXPECT_FALSE(m.is_integral());
}

TEST(Mixture, RejectsNegativeAndNonFinite) {
  Mixture m;
  EXPECT_THROW(m.set(SpeciesId{0}, -1.0), InvalidArgument);
  EXPECT_THROW(m.set(SpeciesId{0}, std::numeric_limits<double>::infinity()), InvalidArgument);
  m.set(SpeciesId{0}, 1.0);
  EXPECT_THROW(m.add(SpeciesId{0}, -2.0), InvalidArgument);
}

Compartment nested(int levels, double d = 60.0) {
  Compartment root = Compartment::sphere("r", 1, d);
  Compartment* at = &root;
  for (int i = 2; i <= levels; ++i) {
    d *= 0.4;
    at->children.push_back(Compartment::sphere(at->id + ".0", i, d));
    at = &at->children.back();
  }
  return root;
}

TEST(Tree, HeightAndValidDepths) {
  for (int h = 1; h <= 3; ++h) {
    const Compartment root = nested(h);
    EXPECT_EQ(tree_height(root), h);
    EXPECT_NO_THROW(validate_tree(root));
  }
}

TEST(Tree, DepthFourViolatesBound) { EXPECT_THROW(validate_tree(nested(4)), InvariantError); }

TEST(Tree, PackingViolation) {
  Compartment root = Compartment::sphere("r", 1, 10.0);
  root.children.push_back(Compartment::sphere("r.0", 2, 9.0));
  root.children.push_back(Compartment::sphere("r.1", 2, 9.0));
  EXPECT_THROW(validate_tree(root), InvariantError);
}

TEST(Tree, WrongDepthLabel) {
  Compartment root = nested(2);
  root.children[0].depth = 3;
  EXPECT_THROW(validate_tree(root), InvariantError);
}

TEST(Tree, FindAndWalk) {
  Compartment root = nested(3);
  ASSERT_NE(find_compartment(root, "r.0.0"), nullptr);
  EXPECT_EQ(find_compartment(root, "r.0.0")->depth, 3);
  EXPECT_EQ(find_compartment(root, "zzz"), nullptr);
  std::vector<std::string> order;
  for_each_compartment(static_cast<const Compartment&>(root),
                       [&](const Compartment& c) { order.push_back(c.id); });
  EXPECT_EQ(order, (std::vector<std::string>{"r", "r.0", "r.0.0"}));
  shift_depth(root.children[0], -1);
  EXPECT_EQ(root.children[0].children[0].depth, 2);
}

TEST(Mvl, MorphologyMustMatchHeight) {
  Mvl m = testing::single(nested(3), Morphology::T1a);
  EXPECT_THROW(m.validate(), InvariantError);
  m.morphology = Morphology::T1b;
  EXPECT_NO_THROW(m.validate());
  EXPECT_EQ(morphology_for_height(1), Morphology::Plain);
  EXPECT_EQ(morphology_for_height(2), Morphology::T1a);
  EXPECT_EQ(morphology_for_height(3), Morphology::T1b);
}

TEST(Rules, AbstractRuleRejectsKineticLaw) {
  SpeciesTable t;
  const SpeciesId a = t.add(Species{"a", PermClass::SmallPolar, {}});
  Rule r{"r", {{a, 1}}, {}, {{a, 2, Target::Here}}, MassActionLaw{1.0}};
  EXPECT_THROW(validate_rule(r, t, Mode::Abstract), InvalidArgument);
  EXPECT_NO_THROW(validate_rule(r, t, Mode::Kinetic));
  r.kinetics = AbstractLaw{};
  EXPECT_NO_THROW(validate_rule(r, t, Mode::Abstract));
  r.reactants.clear();
  EXPECT_THROW(validate_rule(r, t, Mode::Abstract), InvalidArgument);
}

TEST(SystemState, ValidateRejectsDuplicateIds) {
  SystemState s;
  s.mode = Mode::Abstract;
  s.mvls.push_back(testing::single(nested(1)));
  s.mvls.push_back(testing::single(nested(1)));
  EXPECT_THROW(s.validate(), InvariantError);
}

TEST(SystemState, TotalsIncludeEnvironmentAndTree) {
  SystemState s;
  s.mode = Mode::Kinetic;
  const SpeciesId a = s.species.add(Species{"a", PermClass::SmallPolar, {}});
  s.environment.unbounded = false;
  s.environment.volume = 10.0;
  s.environment.contents.set(a, 1.5);
  Compartment root = nested(2);
  root.contents.set(a, 2.0);
  root.children[0].contents.set(a, 0.25);
  s.mvls.push_back(testing::single(std::move(root), Morphology::T1a));
  EXPECT_DOUBLE_EQ(total_amount(s, a), 3.75);
  EXPECT_EQ(max_depth(s), 2);
}

TEST(Audit, WeightedTotalsAndCredit) {
  SystemState s;
  s.mode = Mode::Kinetic;
  const SpeciesId urea = s.species.add(Species{"urea", PermClass::SmallPolar, {}});
  const SpeciesId nh3 = s.species.add(Species{"NH3", PermClass::SmallPolar, {}});
  s.environment.unbounded = false;
  s.environment.contents.set(urea, 3.0);
  s.environment.contents.set(nh3, 1.0);
  const std::vector<AtomTag> atoms{{"N", {{urea, 2.0}, {nh3, 1.0}}}};
  EXPECT_EQ(atom_totals(s, atoms), std::vector<double>{7.0});
  AuditReport report;
  report.start(s, atoms);
  s.environment.contents.add(urea, 1.0);
  report.credit(urea, 1.0, atoms);
  report.update(s, atoms);
  EXPECT_EQ(report.worst(), 0.0);
}

TEST(Random, DerivedStreamsAreIndependentOfOrder) {
  Rng a = derive_stream(42, 5);
  Rng b = derive_stream(42, 5);
  EXPECT_EQ(a(), b());
  Rng c = derive_stream(42, 6);
  EXPECT_NE(derive_stream(42, 5)(), c());
}

TEST(Random, UniformRanges) {
  Rng rng = derive_stream(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = uniform_int(rng, -2, 3);
    ASSERT_GE(k, -2);
    ASSERT_LE(k, 3);
    ASSERT_LT(uniform_index(rng, 7), 7u);
  }
}

TEST(Random, StandardNormalMoments) {
  Rng rng = derive_stream(9, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.02);
}

}  // namespace
}  // namespace liposim
