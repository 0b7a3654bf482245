#pragma once

// Domain model shared by every module: species, mixtures, the compartment
// tree of a multivesicular liposome (MVL), rules and the full system state.
//
// Units: diameters in um, volumes in fL (== um^3). In kinetic mode amounts
// are attomol, so amount / volume is directly a concentration in mM. In
// abstract mode amounts are integer object counts stored exactly in doubles.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "liposim/permeability.hpp"
#include "liposim/types_fwd.hpp"

namespace liposim {

// Deepest compartment nesting observed in electroformed MVLs.
inline constexpr int kMaxDepth = 3;

struct Species {
  std::string name;
  PermClass perm_class = PermClass::SmallPolar;
  std::optional<double> permeability_override;  // um/s

  bool operator==(const Species&) const = default;
};

class SpeciesTable {
 public:
  // Throws InvalidArgument on a duplicate name or a negative override.
  SpeciesId add(Species species);

  std::optional<SpeciesId> find(std::string_view name) const;
  // Throws UnknownIdError.
  SpeciesId at(std::string_view name) const;

  const Species& operator[](SpeciesId id) const { return species_.at(id.index); }
  std::size_t size() const { return species_.size(); }
  std::span<const Species> all() const { return species_; }

  bool operator==(const SpeciesTable&) const = default;

 private:
  std::vector<Species> species_;
};

// Sparse-by-default amounts keyed by species; absent entries read as zero.
class Mixture {
 public:
  double operator[](SpeciesId id) const {
    return id.index < amounts_.size() ? amounts_[id.index] : 0.0;
  }

  // Throws InvalidArgument for negative or non-finite amounts.
  void set(SpeciesId id, double amount);
  // The resulting amount must stay >= 0.
  void add(SpeciesId id, double delta);
  void add(const Mixture& other);

  bool empty() const;
  void clear() { amounts_.clear(); }
  // One past the highest species index that may be nonzero.
  std::size_t extent() const { return amounts_.size(); }

  template <typename F>
  void for_each_nonzero(F&& f) const {
    for (std::uint32_t i = 0; i < amounts_.size(); ++i) {
      if (amounts_[i] != 0.0) f(SpeciesId{i}, amounts_[i]);
    }
  }

  bool is_integral() const;

  // Trailing zero entries do not affect equality.
  bool operator==(const Mixture& other) const;

 private:
  std::vector<double> amounts_;
};

struct Compartment {
  std::string id;
  int depth = 1;                 // 1 = outermost membrane of an MVL
  double diameter = 0.0;         // um; maximal dimension for amorphous T3
  double volume = 0.0;           // fL, geometric volume at construction
  double gas_accumulated = 0.0;  // amol of gas produced inside
  bool membrane_intact = true;
  Mixture contents;
  std::vector<Compartment> children;

  // Membrane-specific overrides installed by insert_channel (um/s).
  std::map<SpeciesId, double> channels;
  // Electroporation state of this membrane.
  double permeability_boost = 1.0;
  std::optional<double> boost_until;

  // Throws InvalidArgument for a nonpositive diameter.
  static Compartment sphere(std::string id, int depth, double diameter_um);

  double effective_volume(double gas_molar_volume_factor) const {
    return volume + gas_molar_volume_factor * gas_accumulated;
  }

  bool operator==(const Compartment&) const = default;
};

// Number of membrane levels in the subtree; a leaf has height 1.
int tree_height(const Compartment& root);

// Checks depth labels, the depth bound, packing (sum of child volumes <=
// parent volume), sphere volume and nonnegative gas. Throws InvariantError.
void validate_tree(const Compartment& root, int expected_depth = 1);

Compartment* find_compartment(Compartment& root, std::string_view id);
const Compartment* find_compartment(const Compartment& root, std::string_view id);

// Pre-order walk.
void for_each_compartment(const Compartment& root, const std::function<void(const Compartment&)>& f);
void for_each_compartment(Compartment& root, const std::function<void(Compartment&)>& f);

// Shifts the depth of every compartment in the subtree by delta.
void shift_depth(Compartment& root, int delta);

Morphology morphology_for_height(int height);

struct Mvl {
  Morphology morphology = Morphology::T1a;
  Compartment root;
  std::string environment_id{"environment"};

  const std::string& id() const { return root.id; }
  bool lysed() const { return !root.membrane_intact; }

  // Tree invariants plus morphology/height agreement. Lysed MVLs are
  // empty husks and only need a valid root label.
  void validate() const;

  bool operator==(const Mvl&) const = default;
};

// The bulk solution around every MVL. A bounded environment tracks its
// amounts like any compartment. An unbounded one is a reservoir with fixed
// concentrations; what the system takes from or gives to it is booked in
// `exchanged` so totals stay auditable.
struct Environment {
  static constexpr std::string_view kId = "environment";

  Mixture contents;
  double volume = 1.0;  // fL
  bool unbounded = true;
  double gas_accumulated = 0.0;
  std::vector<double> exchanged;

  double concentration(SpeciesId id) const { return contents[id] / volume; }
  double exchanged_amount(SpeciesId id) const {
    return id.index < exchanged.size() ? exchanged[id.index] : 0.0;
  }
  // Signed transfer from the system into the environment.
  void receive(SpeciesId id, double amount);
  void receive(const Mixture& m);

  bool operator==(const Environment&) const = default;
};

struct Term {
  SpeciesId species;
  std::uint32_t count = 1;
  bool operator==(const Term&) const = default;
};

struct Product {
  SpeciesId species;
  std::uint32_t count = 1;
  Target target = Target::Here;
  bool operator==(const Product&) const = default;
};

struct AbstractLaw {
  int priority = 0;  // larger fires first
  bool operator==(const AbstractLaw&) const = default;
};

struct MassActionLaw {
  double k = 0.0;
  bool operator==(const MassActionLaw&) const = default;
};

struct MichaelisMentenLaw {
  double kcat = 0.0;  // 1/s
  double km = 0.0;    // mM
  SpeciesId enzyme;
  bool operator==(const MichaelisMentenLaw&) const = default;
};

using RateLaw = std::variant<AbstractLaw, MassActionLaw, MichaelisMentenLaw>;

struct Rule {
  std::string name;
  std::vector<Term> reactants;
  std::vector<Term> catalysts;  // required, never consumed
  std::vector<Product> products;
  RateLaw kinetics = AbstractLaw{};

  bool has_in_target() const;
  // Reactants plus catalysts as one multiset.
  Mixture requirement() const;

  bool operator==(const Rule&) const = default;
};

// Throws InvalidArgument when stoichiometries, species references or the
// rate law do not fit the mode.
void validate_rule(const Rule& rule, const SpeciesTable& species, Mode mode);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Halt;
  std::string compartment_id;
  int depth = 0;
  Mixture payload;
  std::string note;

  bool operator==(const Event&) const = default;
};

// Total order used for traces: time, then compartment id. Stable sorting
// keeps the engine's processing order among equal keys.
bool event_before(const Event& a, const Event& b);

struct SystemState {
  SpeciesTable species;
  PermeabilityTable permeability;
  Environment environment;
  std::vector<Mvl> mvls;
  std::vector<Rule> rules;
  double clock = 0.0;
  std::uint64_t rng_seed = 0;
  Mode mode = Mode::Kinetic;

  // Full invariant check: unique ids, references, trees, mode purity.
  void validate() const;

  Mvl* find_mvl(std::string_view id);
  const Mvl* find_mvl(std::string_view id) const;
  Compartment* find_compartment(std::string_view id);
  const Compartment* find_compartment(std::string_view id) const;

  bool operator==(const SystemState&) const = default;
};

// Amount of a species over the environment and every compartment. For an
// unbounded environment the booked exchange replaces its contents.
double total_amount(const SystemState& state, SpeciesId id);

// Deepest depth label present in any MVL.
int max_depth(const SystemState& state);

}  // namespace liposim
