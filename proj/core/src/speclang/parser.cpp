#include "liposim/speclang/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "lexer.hpp"
#include "liposim/error.hpp"
#include "liposim/types.hpp"

namespace liposim::speclang {

GeneratorParams GeneratorDecl::params() const {
  GeneratorParams p;
  if (prevalence) p.type_prevalence = *prevalence;
  if (outer_diameter) p.outer_diameter = *outer_diameter;
  if (t3_diameter) p.t3_diameter = *t3_diameter;
  if (internal_count) p.internal_count = *internal_count;
  if (t3_internal_count) p.t3_internal_count = *t3_internal_count;
  if (child_fraction) p.child_diameter_fraction = *child_fraction;
  if (t3_child_fraction) p.t3_child_diameter_fraction = *t3_child_fraction;
  if (family) p.family = *family;
  if (seed) p.seed = *seed;
  return p;
}

namespace {

using detail::Token;
using detail::TokenKind;

constexpr std::size_t kMaxDiagnostics = 100;

const std::set<std::string_view> kTopLevel = {"system", "species", "permeability", "atom",      "environment",
                                              "compartment", "generator", "swelling", "rule", "indicator",
                                              "at", "run"};

struct SyntaxError {};

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens, std::vector<Diagnostic> diagnostics)
      : src_(source), tokens_(std::move(tokens)), diags_(std::move(diagnostics)) {}

  ParseResult run() {
    parse_file();
    if (diags_.empty()) check_semantics();
    ParseResult result;
    if (diags_.empty()) {
      result.ast = std::move(ast_);
    } else {
      result.diagnostics = std::move(diags_);
    }
    return result;
  }

 private:
  // --- token access --------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool at_word(std::string_view word) const { return at(TokenKind::Identifier) && peek().text == word; }
  bool accept(TokenKind kind) {
    if (!at(kind)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view word) {
    if (!at_word(word)) return false;
    next();
    return true;
  }

  void error(SourceLoc loc, std::string message) {
    if (diags_.size() < kMaxDiagnostics) diags_.push_back(make_diagnostic(Severity::Error, loc, std::move(message), src_));
  }

  std::string found() const {
    const Token& t = peek();
    if (t.kind == TokenKind::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& expected) {
    error(peek().loc, "expected " + expected + ", found " + found());
    throw SyntaxError{};
  }

  const Token& expect(TokenKind kind, std::string_view what = {}) {
    if (!at(kind)) fail(what.empty() ? std::string(detail::describe(kind)) : std::string(what));
    return next();
  }
  void expect_word(std::string_view word) {
    if (!at_word(word)) fail("'" + std::string(word) + "'");
    next();
  }
  // Units are written as identifiers, `um/s` as three tokens.
  void expect_unit(std::string_view unit) {
    const auto slash = unit.find('/');
    if (slash == std::string_view::npos) {
      if (!at_word(unit)) fail("unit '" + std::string(unit) + "'");
      next();
      return;
    }
    if (!(at_word(unit.substr(0, slash)) && peek(1).kind == TokenKind::Slash && peek(2).kind == TokenKind::Identifier &&
          peek(2).text == unit.substr(slash + 1))) {
      fail("unit '" + std::string(unit) + "'");
    }
    next();
    next();
    next();
  }

  std::string identifier(std::string_view what) { return expect(TokenKind::Identifier, what).text; }

  double number(std::string_view what) {
    if (!at(TokenKind::Number)) fail(std::string(what));
    const Token& t = next();
    double v = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last || !std::isfinite(v)) {
      error(t.loc, "number '" + t.text + "' is out of range");
      throw SyntaxError{};
    }
    return v;
  }

  std::int64_t integer(std::string_view what) {
    if (!at(TokenKind::Number)) fail(std::string(what));
    const Token& t = next();
    std::int64_t v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last) {
      error(t.loc, "expected " + std::string(what) + " as a whole number, found '" + t.text + "'");
      throw SyntaxError{};
    }
    return v;
  }

  std::uint64_t unsigned_integer(std::string_view what) {
    const SourceLoc loc = peek().loc;
    const std::int64_t v = integer(what);
    if (v < 0) {
      error(loc, std::string(what) + " must not be negative");
      throw SyntaxError{};
    }
    return static_cast<std::uint64_t>(v);
  }

  // --- statements -----------------------------------------------------------

  void parse_file() {
    bool header_seen = false;
    while (!at(TokenKind::End)) {
      if (diags_.size() >= kMaxDiagnostics) return;
      const Token& t = peek();
      try {
        if (t.kind != TokenKind::Identifier || !kTopLevel.count(t.text)) {
          fail("a declaration (system, species, compartment, rule, ...)");
        }
        if (t.text == "system") {
          if (header_seen) error(t.loc, "duplicate 'system' header");
          header_seen = true;
          parse_system();
          continue;
        }
        if (!header_seen) {
          error(t.loc, "file must start with 'system NAME mode abstract|kinetic'");
          header_seen = true;  // report once, then parse the rest as kinetic
        }
        statement(t.text);
      } catch (const SyntaxError&) {
        recover();
      }
    }
    if (!header_seen) error(peek().loc, "missing 'system NAME mode abstract|kinetic' header");
  }

  void statement(const std::string& keyword) {
    if (keyword == "species") return parse_species();
    if (keyword == "permeability") return parse_permeability();
    if (keyword == "atom") return parse_atom();
    if (keyword == "environment") return parse_environment();
    if (keyword == "compartment") {
      ast_.compartments.push_back(parse_compartment(1, 1));
      return;
    }
    if (keyword == "generator") return parse_generator();
    if (keyword == "swelling") return parse_swelling();
    if (keyword == "rule") return parse_rule();
    if (keyword == "indicator") return parse_indicator();
    if (keyword == "at") return parse_intervention();
    if (keyword == "run") return parse_run();
  }

  // Skips to the next declaration keyword that starts a line.
  void recover() {
    next();
    while (!at(TokenKind::End)) {
      const Token& t = peek();
      if (t.first_on_line && t.kind == TokenKind::Identifier && kTopLevel.count(t.text)) return;
      next();
    }
  }

  void parse_system() {
    ast_.loc = next().loc;
    ast_.name = identifier("system name");
    expect_word("mode");
    const SourceLoc loc = peek().loc;
    const std::string mode = identifier("'abstract' or 'kinetic'");
    auto m = parse_mode(mode);
    if (!m) {
      error(loc, "unknown mode '" + mode + "' (expected abstract or kinetic)");
      throw SyntaxError{};
    }
    ast_.mode = *m;
  }

  PermClass perm_class() {
    const SourceLoc loc = peek().loc;
    const std::string name = identifier("permeability class");
    auto cls = parse_perm_class(name);
    if (!cls) {
      error(loc, "unknown permeability class '" + name +
                     "' (gas, small_polar, lipophilic, ionic, macromolecule, particle)");
      throw SyntaxError{};
    }
    return *cls;
  }

  void parse_species() {
    SpeciesDecl d;
    d.loc = next().loc;
    d.name = identifier("species name");
    expect_word("class");
    d.perm_class = perm_class();
    if (accept_word("perm")) {
      d.permeability = number("permeability");
      expect_unit("um/s");
    }
    ast_.species.push_back(std::move(d));
  }

  void parse_permeability() {
    PermeabilityDecl d;
    d.loc = next().loc;
    d.perm_class = perm_class();
    d.value = number("permeability");
    expect_unit("um/s");
    ast_.permeability.push_back(d);
  }

  void parse_atom() {
    AtomDecl d;
    d.loc = next().loc;
    d.tag = identifier("atom tag");
    expect(TokenKind::LBrace);
    while (!accept(TokenKind::RBrace)) {
      AtomWeight w;
      w.loc = peek().loc;
      w.species = identifier("species name");
      expect(TokenKind::Colon);
      w.weight = integer("atom count");
      d.weights.push_back(std::move(w));
      accept(TokenKind::Comma);
    }
    ast_.atoms.push_back(std::move(d));
  }

  // `{ species: value [mM], ... }`; `unit` empty means plain counts.
  std::vector<Amount> amounts(bool concentration) {
    std::vector<Amount> out;
    expect(TokenKind::LBrace);
    while (!accept(TokenKind::RBrace)) {
      Amount a;
      a.loc = peek().loc;
      a.species = identifier("species name");
      expect(TokenKind::Colon);
      a.value = number("amount");
      if (concentration) {
        expect_unit("mM");
      } else if (at_word("mM")) {
        error(peek().loc, "abstract-mode amounts are plain object counts; drop the unit");
        throw SyntaxError{};
      }
      out.push_back(std::move(a));
      accept(TokenKind::Comma);
    }
    return out;
  }

  bool kinetic() const { return ast_.mode == Mode::Kinetic; }

  void parse_environment() {
    EnvironmentDecl d;
    d.loc = next().loc;
    if (ast_.environment) error(d.loc, "duplicate 'environment' block");
    if (accept_word("volume")) {
      d.volume = number("environment volume");
      expect_unit("fL");
    } else {
      accept_word("unbounded");
    }
    d.contents = amounts(kinetic());
    ast_.environment = std::move(d);
  }

  CompartmentDecl parse_compartment(int depth, int nesting) {
    if (nesting > kMaxSyntaxNesting) {
      error(peek().loc, "nesting deeper than " + std::to_string(kMaxSyntaxNesting) + " levels");
      throw SyntaxError{};
    }
    CompartmentDecl d;
    d.loc = next().loc;
    d.name = identifier("compartment name");
    if (depth > kMaxDepth) {
      error(d.loc, "compartment '" + d.name + "' is at depth " + std::to_string(depth) +
                       "; MVLs nest at most " + std::to_string(kMaxDepth) + " levels deep");
    }
    expect_word("diameter");
    d.diameter = number("diameter");
    expect_unit("um");
    if (accept_word("morphology")) {
      const SourceLoc loc = peek().loc;
      const std::string m = identifier("morphology");
      auto parsed = parse_morphology(m);
      if (!parsed) {
        error(loc, "unknown morphology '" + m + "' (T1a, T1b, T2, T3, plain)");
        throw SyntaxError{};
      }
      d.morphology = *parsed;
    }
    expect(TokenKind::LBrace);
    while (!accept(TokenKind::RBrace)) {
      if (at_word("contents")) {
        const SourceLoc loc = next().loc;
        auto list = amounts(kinetic());
        if (!d.contents.empty() && !list.empty()) error(loc, "duplicate 'contents' block in '" + d.name + "'");
        for (auto& a : list) d.contents.push_back(std::move(a));
      } else if (at_word("compartment")) {
        d.children.push_back(parse_compartment(depth + 1, nesting + 1));
      } else {
        fail("'contents', 'compartment' or '}'");
      }
    }
    return d;
  }

  TruncatedSpec truncated(std::string_view unit) {
    TruncatedSpec s;
    s.mean = number("mean");
    s.sd = number("standard deviation");
    s.low = number("lower bound");
    s.high = number("upper bound");
    if (!unit.empty()) expect_unit(unit);
    return s;
  }

  FractionRange fraction_range() {
    FractionRange r;
    r.low = number("lower fraction");
    r.high = number("upper fraction");
    return r;
  }

  void parse_generator() {
    GeneratorDecl d;
    d.loc = next().loc;
    if (ast_.generator) error(d.loc, "duplicate 'generator' block");
    expect(TokenKind::LBrace);
    std::set<std::string> seen;
    while (!accept(TokenKind::RBrace)) {
      const SourceLoc loc = peek().loc;
      const std::string key = identifier("generator field");
      if (!seen.insert(key).second) error(loc, "duplicate generator field '" + key + "'");
      expect(TokenKind::Equals);
      if (key == "n") {
        d.n = unsigned_integer("population size");
      } else if (key == "seed") {
        d.seed = unsigned_integer("seed");
      } else if (key == "prevalence") {
        std::array<double, 4> p{};
        for (double& x : p) x = number("prevalence");
        d.prevalence = p;
      } else if (key == "outer_diameter") {
        d.outer_diameter = truncated("um");
      } else if (key == "t3_diameter") {
        d.t3_diameter = truncated("um");
      } else if (key == "internal_count") {
        d.internal_count = truncated({});
      } else if (key == "t3_internal_count") {
        const auto lo = integer("lower count");
        const auto hi = integer("upper count");
        if (lo < 0 || hi > 1000000) {
          error(loc, "t3_internal_count must lie in [0, 1000000]");
          throw SyntaxError{};
        }
        d.t3_internal_count = CountRange{static_cast<int>(lo), static_cast<int>(hi)};
      } else if (key == "child_fraction") {
        d.child_fraction = fraction_range();
      } else if (key == "t3_child_fraction") {
        d.t3_child_fraction = fraction_range();
      } else if (key == "family") {
        const SourceLoc floc = peek().loc;
        const std::string f = identifier("'normal' or 'lognormal'");
        auto fam = parse_distribution_family(f);
        if (!fam) {
          error(floc, "unknown distribution family '" + f + "' (normal or lognormal)");
          throw SyntaxError{};
        }
        d.family = *fam;
      } else {
        error(loc, "unknown generator field '" + key + "'");
        throw SyntaxError{};
      }
      accept(TokenKind::Comma);
    }
    ast_.generator = std::move(d);
  }

  void parse_swelling() {
    SwellingDecl d;
    d.loc = next().loc;
    if (ast_.swelling) error(d.loc, "duplicate 'swelling' block");
    d.concentrations = amounts(true);
    ast_.swelling = std::move(d);
  }

  std::optional<Target> target_name() {
    const SourceLoc loc = peek().loc;
    const std::string name = identifier("target (here, out, in)");
    auto t = parse_target(name);
    if (!t) {
      error(loc, "unknown target '" + name + "' (here, out, in)");
      throw SyntaxError{};
    }
    return t;
  }

  // `none` or `[COUNT] name[@target] + ...`
  std::vector<TermDecl> side(bool products) {
    std::vector<TermDecl> terms;
    if (accept_word("none")) return terms;
    do {
      TermDecl t;
      t.loc = peek().loc;
      if (at(TokenKind::Number)) {
        const SourceLoc loc = peek().loc;
        const std::int64_t c = integer("stoichiometry");
        if (c < 1 || c > 1000000) {
          error(loc, "stoichiometry must be a positive whole number");
          throw SyntaxError{};
        }
        t.count = static_cast<std::uint32_t>(c);
      }
      t.species = identifier("species name");
      if (at(TokenKind::At) && peek().glued) {
        if (!products) {
          error(peek().loc, "only products take a target");
          throw SyntaxError{};
        }
        next();
        t.target = target_name();
      }
      terms.push_back(std::move(t));
    } while (accept(TokenKind::Plus));
    return terms;
  }

  void parse_rule() {
    RuleDecl d;
    d.loc = next().loc;
    d.name = identifier("rule name");
    expect(TokenKind::Colon);
    d.reactants = side(false);
    expect(TokenKind::Arrow);
    d.products = side(true);
    if (accept(TokenKind::At)) d.default_target = target_name();
    if (accept_word("catalyst")) {
      d.catalysts = side(false);
      if (d.catalysts.empty()) error(d.loc, "'catalyst' needs at least one species");
    }
    if (accept_word("priority")) {
      d.kinetics = PriorityDecl{static_cast<int>(std::clamp<std::int64_t>(integer("priority"), -1000000, 1000000))};
    } else if (accept_word("kinetics")) {
      const SourceLoc loc = peek().loc;
      const std::string law = identifier("'mm' or 'mass_action'");
      expect(TokenKind::LParen);
      std::map<std::string, double> values;
      std::optional<std::string> enzyme;
      SourceLoc enzyme_loc;
      while (!accept(TokenKind::RParen)) {
        const SourceLoc kloc = peek().loc;
        const std::string key = identifier("parameter name");
        expect(TokenKind::Equals);
        if (key == "enzyme") {
          enzyme_loc = peek().loc;
          enzyme = identifier("enzyme species");
        } else if (key == "km") {
          values[key] = number("km");
          expect_unit("mM");
        } else if (key == "kcat" || key == "k") {
          values[key] = number(key);
        } else {
          error(kloc, "unknown rate parameter '" + key + "'");
          throw SyntaxError{};
        }
        if (!at(TokenKind::RParen)) expect(TokenKind::Comma);
      }
      const auto need = [&](const char* key) {
        auto it = values.find(key);
        if (it == values.end()) {
          error(loc, std::string("rate law '") + law + "' needs " + key);
          throw SyntaxError{};
        }
        return it->second;
      };
      if (law == "mm") {
        if (!enzyme) {
          error(loc, "rate law 'mm' needs enzyme");
          throw SyntaxError{};
        }
        d.kinetics = MichaelisMentenDecl{need("kcat"), need("km"), *enzyme, enzyme_loc};
      } else if (law == "mass_action") {
        d.kinetics = MassActionDecl{need("k")};
      } else {
        error(loc, "unknown rate law '" + law + "' (mm or mass_action)");
        throw SyntaxError{};
      }
    }
    ast_.rules.push_back(std::move(d));
  }

  void parse_indicator() {
    IndicatorDecl d;
    d.loc = next().loc;
    if (ast_.indicator) error(d.loc, "duplicate 'indicator'");
    d.species = identifier("species name");
    expect_word("above");
    d.threshold = number("threshold");
    expect_unit("mM");
    ast_.indicator = std::move(d);
  }

  void parse_intervention() {
    InterventionDecl d;
    d.loc = next().loc;
    d.time = number("time");
    expect_unit("s");
    expect_word("do");
    const SourceLoc loc = peek().loc;
    const std::string op = identifier("intervention (dc_pulse, electroporate, inject, insert_channel)");
    if (op == "dc_pulse") {
      DcPulseDecl p;
      do {
        p.targets.push_back(identifier("MVL id"));
      } while (accept(TokenKind::Comma));
      d.op = std::move(p);
    } else if (op == "electroporate") {
      ElectroporateDecl e;
      e.target = identifier("MVL id");
      e.duration = number("duration");
      expect_unit("s");
      e.boost = number("permeability boost");
      d.op = std::move(e);
    } else if (op == "inject") {
      InjectDecl in;
      in.compartment = identifier("compartment id");
      in.species = identifier("species name");
      in.amount = number("amount");
      if (kinetic()) expect_unit("amol");
      d.op = std::move(in);
    } else if (op == "insert_channel") {
      InsertChannelDecl c;
      c.compartment = identifier("compartment id");
      c.species = identifier("species name");
      c.permeability = number("permeability");
      expect_unit("um/s");
      d.op = std::move(c);
    } else {
      error(loc, "unknown intervention '" + op + "' (dc_pulse, electroporate, inject, insert_channel)");
      throw SyntaxError{};
    }
    ast_.interventions.push_back(std::move(d));
  }

  void parse_run() {
    RunDecl d;
    d.loc = next().loc;
    if (ast_.run) error(d.loc, "duplicate 'run' block");
    expect(TokenKind::LBrace);
    std::set<std::string> seen;
    while (!accept(TokenKind::RBrace)) {
      const SourceLoc loc = peek().loc;
      const std::string key = identifier("run field");
      if (!seen.insert(key).second) error(loc, "duplicate run field '" + key + "'");
      expect(TokenKind::Equals);
      if (key == "dt") {
        d.dt = number("time step");
        expect_unit("s");
      } else if (key == "steps") {
        d.steps = unsigned_integer("step count");
      } else if (key == "seed") {
        d.seed = unsigned_integer("seed");
      } else if (key == "sample_every") {
        d.sample_every = unsigned_integer("sampling stride");
      } else if (key == "burst_ratio") {
        d.burst_ratio = number("burst volume ratio");
      } else if (key == "gas_factor") {
        d.gas_factor = number("gas volume factor");
        expect_unit("fL");
        expect(TokenKind::Slash);
        expect_word("amol");
      } else if (key == "solver") {
        const SourceLoc sloc = peek().loc;
        const std::string s = identifier("'euler' or 'pairwise'");
        auto solver = engine::parse_diffusion_solver(s);
        if (!solver) {
          error(sloc, "unknown solver '" + s + "' (euler or pairwise)");
          throw SyntaxError{};
        }
        d.solver = *solver;
      } else {
        error(loc, "unknown run field '" + key + "'");
        throw SyntaxError{};
      }
      accept(TokenKind::Comma);
    }
    ast_.run = std::move(d);
  }

  // --- semantic checks ------------------------------------------------------

  void check_species_ref(const std::string& name, SourceLoc loc) {
    if (!species_.count(name)) error(loc, "undeclared species '" + name + "'");
  }

  void check_amounts(const std::vector<Amount>& list, bool counts) {
    std::set<std::string> seen;
    for (const auto& a : list) {
      check_species_ref(a.species, a.loc);
      if (!seen.insert(a.species).second) error(a.loc, "species '" + a.species + "' listed twice");
      if (a.value < 0.0) error(a.loc, "amount of '" + a.species + "' must not be negative");
      if (counts && a.value != std::floor(a.value)) {
        error(a.loc, "abstract-mode amount of '" + a.species + "' must be a whole number");
      }
    }
  }

  void check_compartment(const CompartmentDecl& c, int depth, std::set<std::string>& names) {
    if (!names.insert(c.name).second) error(c.loc, "duplicate compartment name '" + c.name + "'");
    if (c.name == Environment::kId) error(c.loc, "'environment' is reserved");
    if (!(c.diameter > 0.0)) error(c.loc, "compartment '" + c.name + "' needs a positive diameter");
    if (c.morphology && depth != 1) error(c.loc, "only an outermost compartment takes a morphology");
    check_amounts(c.contents, !kinetic());
    for (const auto& child : c.children) check_compartment(child, depth + 1, names);
  }

  void check_semantics() {
    const bool abstract = !kinetic();
    for (const auto& s : ast_.species) {
      if (!species_.emplace(s.name, s.perm_class).second) error(s.loc, "duplicate species '" + s.name + "'");
      if (s.permeability && *s.permeability < 0.0) error(s.loc, "permeability must not be negative");
      if (s.name == "none") error(s.loc, "'none' is reserved");
    }
    for (const auto& p : ast_.permeability) {
      if (p.value < 0.0) error(p.loc, "permeability must not be negative");
      if (abstract) error(p.loc, "permeability has no effect in abstract mode");
    }
    std::set<std::string> tags;
    for (const auto& a : ast_.atoms) {
      if (!tags.insert(a.tag).second) error(a.loc, "duplicate atom tag '" + a.tag + "'");
      for (const auto& w : a.weights) check_species_ref(w.species, w.loc);
    }
    if (ast_.environment) {
      if (abstract && ast_.environment->volume) {
        error(ast_.environment->loc, "an abstract-mode environment has no volume");
      }
      if (ast_.environment->volume && !(*ast_.environment->volume > 0.0)) {
        error(ast_.environment->loc, "environment volume must be positive");
      }
      check_amounts(ast_.environment->contents, abstract);
    }

    const bool explicit_tree = !ast_.compartments.empty();
    if (explicit_tree == ast_.generator.has_value()) {
      error(ast_.loc, explicit_tree ? "give either compartment trees or a generator block, not both"
                                    : "scenario needs compartment trees or a generator block");
    }
    std::set<std::string> names;
    for (const auto& c : ast_.compartments) check_compartment(c, 1, names);
    std::set<std::string> roots;
    for (const auto& c : ast_.compartments) roots.insert(c.name);

    if (ast_.generator) {
      const GeneratorDecl& g = *ast_.generator;
      if (g.n && *g.n == 0) error(g.loc, "generator needs n >= 1");
      if (g.n && *g.n > 10000000) error(g.loc, "generator n is larger than 10000000");
      try {
        g.params().validate();
      } catch (const std::exception& e) {
        error(g.loc, e.what());
      }
    }
    if (ast_.swelling) {
      if (abstract) error(ast_.swelling->loc, "a swelling solution needs kinetic mode");
      check_amounts(ast_.swelling->concentrations, false);
    }

    std::set<std::string> rule_names;
    for (const auto& r : ast_.rules) check_rule(r, rule_names);

    if (ast_.indicator) {
      check_species_ref(ast_.indicator->species, ast_.indicator->loc);
      if (abstract) error(ast_.indicator->loc, "an indicator needs kinetic mode");
      if (ast_.indicator->threshold < 0.0) error(ast_.indicator->loc, "indicator threshold must not be negative");
    }

    double last = -INFINITY;
    for (const auto& iv : ast_.interventions) {
      if (iv.time < 0.0) error(iv.loc, "intervention time must not be negative");
      if (iv.time < last) error(iv.loc, "intervention times must not decrease");
      last = std::max(last, iv.time);
      check_intervention(iv, explicit_tree, roots, names);
    }

    if (ast_.run) {
      const RunDecl& r = *ast_.run;
      if (r.dt && !(*r.dt > 0.0)) error(r.loc, "dt must be positive");
      if (r.steps && *r.steps == 0) error(r.loc, "steps must be at least 1");
      if (r.sample_every && *r.sample_every == 0) error(r.loc, "sample_every must be at least 1");
      if (r.burst_ratio && !(*r.burst_ratio > 1.0)) error(r.loc, "burst_ratio must exceed 1");
      if (r.gas_factor && *r.gas_factor < 0.0) error(r.loc, "gas_factor must not be negative");
      if (abstract && (r.dt || r.burst_ratio || r.gas_factor || r.solver)) {
        error(r.loc, "dt, burst_ratio, gas_factor and solver only apply in kinetic mode");
      }
    }
  }

  void check_rule(const RuleDecl& r, std::set<std::string>& names) {
    if (!names.insert(r.name).second) error(r.loc, "duplicate rule name '" + r.name + "'");
    for (const auto& t : r.reactants) check_species_ref(t.species, t.loc);
    for (const auto& t : r.products) check_species_ref(t.species, t.loc);
    for (const auto& t : r.catalysts) check_species_ref(t.species, t.loc);
    const bool abstract = !kinetic();
    if (abstract) {
      if (r.reactants.empty()) error(r.loc, "abstract rule '" + r.name + "' must consume something");
      if (std::holds_alternative<MassActionDecl>(r.kinetics) ||
          std::holds_alternative<MichaelisMentenDecl>(r.kinetics)) {
        error(r.loc, "rule '" + r.name + "' has a rate law but the system is abstract");
      }
      return;
    }
    if (std::holds_alternative<PriorityDecl>(r.kinetics)) {
      error(r.loc, "priorities only apply in abstract mode");
    } else if (std::holds_alternative<std::monostate>(r.kinetics)) {
      error(r.loc, "kinetic rule '" + r.name + "' needs 'kinetics mm(...)' or 'kinetics mass_action(...)'");
    } else if (const auto* ma = std::get_if<MassActionDecl>(&r.kinetics)) {
      if (ma->k < 0.0) error(r.loc, "rate constant must not be negative");
    } else if (const auto* mm = std::get_if<MichaelisMentenDecl>(&r.kinetics)) {
      check_species_ref(mm->enzyme, mm->loc);
      if (r.reactants.size() != 1 || r.reactants.front().count != 1) {
        error(r.loc, "Michaelis-Menten rule '" + r.name + "' needs exactly one substrate");
      }
      if (mm->kcat < 0.0) error(r.loc, "kcat must not be negative");
      if (!(mm->km > 0.0)) error(r.loc, "km must be positive");
    }
  }

  void check_intervention(const InterventionDecl& iv, bool explicit_tree, const std::set<std::string>& roots,
                          const std::set<std::string>& names) {
    const auto is_root = [&](const std::string& id) {
      if (explicit_tree) return roots.count(id) > 0;
      // Generated MVLs are named m0 .. m<n-1>.
      const std::size_t n = ast_.generator ? ast_.generator->count() : 0;
      if (id.size() < 2 || id[0] != 'm') return false;
      std::size_t index = 0;
      auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), index);
      return ec == std::errc{} && p == id.data() + id.size() && index < n;
    };
    const auto is_compartment = [&](const std::string& id) {
      return !explicit_tree || names.count(id) > 0 || id == Environment::kId;
    };
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, DcPulseDecl>) {
            for (const auto& t : op.targets) {
              if (!is_root(t)) error(iv.loc, "dc_pulse target '" + t + "' is not an MVL");
            }
          } else if constexpr (std::is_same_v<T, ElectroporateDecl>) {
            if (!kinetic()) error(iv.loc, "electroporation needs kinetic mode");
            if (!is_root(op.target)) error(iv.loc, "electroporate target '" + op.target + "' is not an MVL");
            if (!(op.duration > 0.0)) error(iv.loc, "electroporation duration must be positive");
            if (!(op.boost >= 1.0)) error(iv.loc, "electroporation boost must be at least 1");
          } else if constexpr (std::is_same_v<T, InjectDecl>) {
            check_species_ref(op.species, iv.loc);
            if (!is_compartment(op.compartment)) error(iv.loc, "unknown compartment '" + op.compartment + "'");
            if (!(op.amount >= 0.0)) error(iv.loc, "injected amount must be >= 0");
            if (!kinetic() && op.amount != std::floor(op.amount)) {
              error(iv.loc, "abstract-mode injection must be a whole number");
            }
          } else {
            check_species_ref(op.species, iv.loc);
            if (!kinetic()) error(iv.loc, "channels need kinetic mode");
            if (!is_compartment(op.compartment) || op.compartment == Environment::kId) {
              error(iv.loc, "unknown compartment '" + op.compartment + "'");
            }
            if (op.permeability < 0.0) error(iv.loc, "channel permeability must not be negative");
          }
        },
        iv.op);
  }

  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic> diags_;
  ScenarioAst ast_;
  std::map<std::string, PermClass> species_;
};

}  // namespace

ParseResult parse(std::string_view source) {
  try {
    auto lexed = detail::lex(source);
    return Parser(source, std::move(lexed.tokens), std::move(lexed.diagnostics)).run();
  } catch (const std::exception& e) {
    // Out of memory and the like; keep the promise of never throwing.
    ParseResult r;
    r.diagnostics.push_back(Diagnostic{Severity::Error, 1, 1, std::string("internal error: ") + e.what(), {}});
    return r;
  }
}

}  // namespace liposim::speclang
