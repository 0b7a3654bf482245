#pragma once

// Syntax tree of a .psys scenario. Species and compartments are referred to
// by name; the parser has already checked every reference. Optional fields
// stay empty when the source left them out, so serialization can omit them.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "liposim/engine.hpp"
#include "liposim/population.hpp"
#include "liposim/speclang/diagnostic.hpp"
#include "liposim/truncated.hpp"
#include "liposim/types_fwd.hpp"

namespace liposim::speclang {

struct SpeciesDecl {
  std::string name;
  PermClass perm_class = PermClass::SmallPolar;
  std::optional<double> permeability;  // um/s
  SourceLoc loc;
  bool operator==(const SpeciesDecl&) const = default;
};

struct PermeabilityDecl {
  PermClass perm_class = PermClass::SmallPolar;
  double value = 0.0;  // um/s
  SourceLoc loc;
  bool operator==(const PermeabilityDecl&) const = default;
};

struct AtomWeight {
  std::string species;
  std::int64_t weight = 0;
  SourceLoc loc;
  bool operator==(const AtomWeight&) const = default;
};

struct AtomDecl {
  std::string tag;
  std::vector<AtomWeight> weights;
  SourceLoc loc;
  bool operator==(const AtomDecl&) const = default;
};

// `species: value` inside a braced list. mM in kinetic mode, a plain
// count in abstract mode.
struct Amount {
  std::string species;
  double value = 0.0;
  SourceLoc loc;
  bool operator==(const Amount&) const = default;
};

struct EnvironmentDecl {
  std::optional<double> volume;  // fL; empty means unbounded
  std::vector<Amount> contents;
  SourceLoc loc;
  bool operator==(const EnvironmentDecl&) const = default;
};

struct CompartmentDecl {
  std::string name;
  double diameter = 0.0;  // um
  std::optional<Morphology> morphology;
  std::vector<Amount> contents;
  std::vector<CompartmentDecl> children;
  SourceLoc loc;
  bool operator==(const CompartmentDecl&) const = default;
};

struct GeneratorDecl {
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<std::array<double, 4>> prevalence;
  std::optional<TruncatedSpec> outer_diameter;
  std::optional<TruncatedSpec> t3_diameter;
  std::optional<TruncatedSpec> internal_count;
  std::optional<CountRange> t3_internal_count;
  std::optional<FractionRange> child_fraction;
  std::optional<FractionRange> t3_child_fraction;
  std::optional<DistributionFamily> family;
  SourceLoc loc;

  GeneratorParams params() const;
  std::size_t count() const { return n ? static_cast<std::size_t>(*n) : 1; }
  bool operator==(const GeneratorDecl&) const = default;
};

struct SwellingDecl {
  std::vector<Amount> concentrations;  // mM
  SourceLoc loc;
  bool operator==(const SwellingDecl&) const = default;
};

struct TermDecl {
  std::string species;
  std::uint32_t count = 1;
  std::optional<Target> target;  // products only, written `name@target`
  SourceLoc loc;
  bool operator==(const TermDecl&) const = default;
};

struct PriorityDecl {
  int priority = 0;
  bool operator==(const PriorityDecl&) const = default;
};
struct MassActionDecl {
  double k = 0.0;
  bool operator==(const MassActionDecl&) const = default;
};
struct MichaelisMentenDecl {
  double kcat = 0.0;  // 1/s
  double km = 0.0;    // mM
  std::string enzyme;
  SourceLoc loc;
  bool operator==(const MichaelisMentenDecl&) const = default;
};

struct RuleDecl {
  std::string name;
  std::vector<TermDecl> reactants;
  std::vector<TermDecl> products;
  // ` @target` after the product list: applies to products without their own.
  std::optional<Target> default_target;
  std::vector<TermDecl> catalysts;
  std::variant<std::monostate, PriorityDecl, MassActionDecl, MichaelisMentenDecl> kinetics;
  SourceLoc loc;
  bool operator==(const RuleDecl&) const = default;
};

struct IndicatorDecl {
  std::string species;
  double threshold = 0.0;  // mM
  SourceLoc loc;
  bool operator==(const IndicatorDecl&) const = default;
};

struct DcPulseDecl {
  std::vector<std::string> targets;
  bool operator==(const DcPulseDecl&) const = default;
};
struct ElectroporateDecl {
  std::string target;
  double duration = 0.0;  // s
  double boost = 1.0;
  bool operator==(const ElectroporateDecl&) const = default;
};
struct InjectDecl {
  std::string compartment;
  std::string species;
  double amount = 0.0;  // amol, or objects in abstract mode
  bool operator==(const InjectDecl&) const = default;
};
struct InsertChannelDecl {
  std::string compartment;
  std::string species;
  double permeability = 0.0;  // um/s
  bool operator==(const InsertChannelDecl&) const = default;
};

struct InterventionDecl {
  double time = 0.0;  // s
  std::variant<DcPulseDecl, ElectroporateDecl, InjectDecl, InsertChannelDecl> op;
  SourceLoc loc;
  bool operator==(const InterventionDecl&) const = default;
};

struct RunDecl {
  std::optional<double> dt;  // s
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> sample_every;
  std::optional<double> burst_ratio;
  std::optional<double> gas_factor;  // fL per amol
  std::optional<engine::DiffusionSolver> solver;
  SourceLoc loc;
  bool operator==(const RunDecl&) const = default;
};

struct ScenarioAst {
  std::string name;
  Mode mode = Mode::Kinetic;
  std::vector<SpeciesDecl> species;
  std::vector<PermeabilityDecl> permeability;
  std::vector<AtomDecl> atoms;
  std::optional<EnvironmentDecl> environment;
  std::vector<CompartmentDecl> compartments;  // roots of explicit MVLs
  std::optional<GeneratorDecl> generator;
  std::optional<SwellingDecl> swelling;
  std::vector<RuleDecl> rules;
  std::optional<IndicatorDecl> indicator;
  std::vector<InterventionDecl> interventions;
  std::optional<RunDecl> run;
  SourceLoc loc;

  bool operator==(const ScenarioAst&) const = default;
};

}  // namespace liposim::speclang
