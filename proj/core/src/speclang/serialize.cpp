#include "liposim/speclang/serialize.hpp"

#include <sstream>

#include "liposim/trace.hpp"

namespace liposim::speclang {

namespace {

std::string num(double v) { return format_number(v); }

class Writer {
 public:
  explicit Writer(const ScenarioAst& ast) : ast_(ast) {}

  std::string write() {
    out_ << "system " << ast_.name << " mode " << to_string(ast_.mode) << "\n";
    if (!ast_.species.empty()) out_ << "\n";
    for (const auto& s : ast_.species) {
      out_ << "species " << s.name << " class " << to_string(s.perm_class);
      if (s.permeability) out_ << " perm " << num(*s.permeability) << " um/s";
      out_ << "\n";
    }
    if (!ast_.permeability.empty()) out_ << "\n";
    for (const auto& p : ast_.permeability) {
      out_ << "permeability " << to_string(p.perm_class) << " " << num(p.value) << " um/s\n";
    }
    if (!ast_.atoms.empty()) out_ << "\n";
    for (const auto& a : ast_.atoms) {
      out_ << "atom " << a.tag << " {";
      for (std::size_t i = 0; i < a.weights.size(); ++i) {
        out_ << (i ? ", " : " ") << a.weights[i].species << ": " << a.weights[i].weight;
      }
      out_ << (a.weights.empty() ? "}\n" : " }\n");
    }
    if (ast_.environment) {
      out_ << "\nenvironment ";
      if (ast_.environment->volume) out_ << "volume " << num(*ast_.environment->volume) << " fL ";
      amounts(ast_.environment->contents, kinetic(), 0);
      out_ << "\n";
    }
    for (const auto& c : ast_.compartments) {
      out_ << "\n";
      compartment(c, 0);
    }
    if (ast_.generator) generator(*ast_.generator);
    if (ast_.swelling) {
      out_ << "\nswelling ";
      amounts(ast_.swelling->concentrations, true, 0);
      out_ << "\n";
    }
    if (!ast_.rules.empty()) out_ << "\n";
    for (const auto& r : ast_.rules) rule(r);
    if (ast_.indicator) {
      out_ << "\nindicator " << ast_.indicator->species << " above " << num(ast_.indicator->threshold) << " mM\n";
    }
    if (!ast_.interventions.empty()) out_ << "\n";
    for (const auto& iv : ast_.interventions) intervention(iv);
    if (ast_.run) run(*ast_.run);
    return out_.str();
  }

 private:
  bool kinetic() const { return ast_.mode == Mode::Kinetic; }

  void indent(int level) {
    for (int i = 0; i < level; ++i) out_ << "  ";
  }

  void amounts(const std::vector<Amount>& list, bool concentration, int level) {
    if (list.empty()) {
      out_ << "{}";
      return;
    }
    out_ << "{\n";
    for (const auto& a : list) {
      indent(level + 1);
      out_ << a.species << ": " << num(a.value) << (concentration ? " mM" : "") << "\n";
    }
    indent(level);
    out_ << "}";
  }

  void compartment(const CompartmentDecl& c, int level) {
    indent(level);
    out_ << "compartment " << c.name << " diameter " << num(c.diameter) << " um";
    if (c.morphology) out_ << " morphology " << to_string(*c.morphology);
    if (c.contents.empty() && c.children.empty()) {
      out_ << " {}\n";
      return;
    }
    out_ << " {\n";
    if (!c.contents.empty()) {
      indent(level + 1);
      out_ << "contents ";
      amounts(c.contents, kinetic(), level + 1);
      out_ << "\n";
    }
    for (const auto& child : c.children) compartment(child, level + 1);
    indent(level);
    out_ << "}\n";
  }

  static std::string spec(const TruncatedSpec& s) {
    return num(s.mean) + " " + num(s.sd) + " " + num(s.low) + " " + num(s.high);
  }

  void generator(const GeneratorDecl& g) {
    out_ << "\ngenerator {\n";
    if (g.n) out_ << "  n = " << *g.n << "\n";
    if (g.seed) out_ << "  seed = " << *g.seed << "\n";
    if (g.prevalence) {
      out_ << "  prevalence =";
      for (double p : *g.prevalence) out_ << " " << num(p);
      out_ << "\n";
    }
    if (g.outer_diameter) out_ << "  outer_diameter = " << spec(*g.outer_diameter) << " um\n";
    if (g.t3_diameter) out_ << "  t3_diameter = " << spec(*g.t3_diameter) << " um\n";
    if (g.internal_count) out_ << "  internal_count = " << spec(*g.internal_count) << "\n";
    if (g.t3_internal_count) {
      out_ << "  t3_internal_count = " << g.t3_internal_count->low << " " << g.t3_internal_count->high << "\n";
    }
    if (g.child_fraction) {
      out_ << "  child_fraction = " << num(g.child_fraction->low) << " " << num(g.child_fraction->high) << "\n";
    }
    if (g.t3_child_fraction) {
      out_ << "  t3_child_fraction = " << num(g.t3_child_fraction->low) << " " << num(g.t3_child_fraction->high)
           << "\n";
    }
    if (g.family) out_ << "  family = " << to_string(*g.family) << "\n";
    out_ << "}\n";
  }

  void terms(const std::vector<TermDecl>& list) {
    if (list.empty()) {
      out_ << "none";
      return;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out_ << " + ";
      if (list[i].count != 1) out_ << list[i].count << " ";
      out_ << list[i].species;
      if (list[i].target) out_ << "@" << to_string(*list[i].target);
    }
  }

  void rule(const RuleDecl& r) {
    out_ << "rule " << r.name << ": ";
    terms(r.reactants);
    out_ << " -> ";
    terms(r.products);
    if (r.default_target) out_ << " @" << to_string(*r.default_target);
    if (!r.catalysts.empty()) {
      out_ << " catalyst ";
      terms(r.catalysts);
    }
    if (const auto* p = std::get_if<PriorityDecl>(&r.kinetics)) {
      out_ << " priority " << p->priority;
    } else if (const auto* ma = std::get_if<MassActionDecl>(&r.kinetics)) {
      out_ << " kinetics mass_action(k=" << num(ma->k) << ")";
    } else if (const auto* mm = std::get_if<MichaelisMentenDecl>(&r.kinetics)) {
      out_ << " kinetics mm(kcat=" << num(mm->kcat) << ", km=" << num(mm->km) << " mM, enzyme=" << mm->enzyme
           << ")";
    }
    out_ << "\n";
  }

  void intervention(const InterventionDecl& iv) {
    out_ << "at " << num(iv.time) << " s do ";
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, DcPulseDecl>) {
            out_ << "dc_pulse";
            for (std::size_t i = 0; i < op.targets.size(); ++i) out_ << (i ? ", " : " ") << op.targets[i];
          } else if constexpr (std::is_same_v<T, ElectroporateDecl>) {
            out_ << "electroporate " << op.target << " " << num(op.duration) << " s " << num(op.boost);
          } else if constexpr (std::is_same_v<T, InjectDecl>) {
            out_ << "inject " << op.compartment << " " << op.species << " " << num(op.amount);
            if (kinetic()) out_ << " amol";
          } else {
            out_ << "insert_channel " << op.compartment << " " << op.species << " " << num(op.permeability)
                 << " um/s";
          }
        },
        iv.op);
    out_ << "\n";
  }

  void run(const RunDecl& r) {
    out_ << "\nrun {\n";
    if (r.dt) out_ << "  dt = " << num(*r.dt) << " s\n";
    if (r.steps) out_ << "  steps = " << *r.steps << "\n";
    if (r.seed) out_ << "  seed = " << *r.seed << "\n";
    if (r.sample_every) out_ << "  sample_every = " << *r.sample_every << "\n";
    if (r.burst_ratio) out_ << "  burst_ratio = " << num(*r.burst_ratio) << "\n";
    if (r.gas_factor) out_ << "  gas_factor = " << num(*r.gas_factor) << " fL/amol\n";
    if (r.solver) out_ << "  solver = " << engine::to_string(*r.solver) << "\n";
    out_ << "}\n";
  }

  const ScenarioAst& ast_;
  std::ostringstream out_;
};

}  // namespace

std::string serialize(const ScenarioAst& ast) { return Writer(ast).write(); }

}  // namespace liposim::speclang
