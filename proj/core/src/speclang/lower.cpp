#include "liposim/speclang/lower.hpp"

#include <functional>

#include "liposim/error.hpp"
#include "liposim/population.hpp"

namespace liposim::speclang {

namespace {

struct LowerError {};

class Lowerer {
 public:
  Lowerer(const ScenarioAst& ast, std::string_view source) : ast_(ast), src_(source) {}

  LowerResult run() {
    LowerResult result;
    try {
      Scenario s;
      build(s);
      if (!has_errors(diags_)) result.scenario = std::move(s);
    } catch (const LowerError&) {
    }
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void error(SourceLoc loc, std::string message) {
    diags_.push_back(make_diagnostic(Severity::Error, loc, std::move(message), src_));
  }
  void warning(SourceLoc loc, std::string message) {
    diags_.push_back(make_diagnostic(Severity::Warning, loc, std::move(message), src_));
  }

  SpeciesId sp(const std::string& name, SourceLoc loc) {
    auto id = state_->species.find(name);
    if (!id) {
      error(loc, "undeclared species '" + name + "'");
      throw LowerError{};
    }
    return *id;
  }

  bool kinetic() const { return ast_.mode == Mode::Kinetic; }

  void build(Scenario& s) {
    state_ = &s.state;
    SystemState& state = s.state;
    state.mode = ast_.mode;
    for (const auto& d : ast_.species) {
      try {
        state.species.add(Species{d.name, d.perm_class, d.permeability});
      } catch (const std::exception& e) {
        error(d.loc, e.what());
        throw LowerError{};
      }
    }
    for (const auto& p : ast_.permeability) state.permeability.set(p.perm_class, p.value);

    build_environment(state);
    build_mvls(state);
    build_rules(state);

    for (const auto& a : ast_.atoms) {
      AtomTag tag{a.tag, {}};
      for (const auto& w : a.weights) tag.weights.emplace_back(sp(w.species, w.loc), static_cast<double>(w.weight));
      s.atoms.push_back(std::move(tag));
    }

    build_config(s);
    build_schedule(s);

    try {
      state.validate();
    } catch (const std::exception& e) {
      error(ast_.loc, e.what());
    }
  }

  void build_environment(SystemState& state) {
    Environment& env = state.environment;
    if (!kinetic()) {
      // Objects sent out of an MVL have to stay countable.
      env.unbounded = false;
      env.volume = 1.0;
    } else if (ast_.environment && ast_.environment->volume) {
      env.unbounded = false;
      env.volume = *ast_.environment->volume;
    } else {
      env.unbounded = true;
      env.volume = 1.0;
    }
    if (!ast_.environment) return;
    for (const auto& a : ast_.environment->contents) {
      env.contents.set(sp(a.species, a.loc), kinetic() ? a.value * env.volume : a.value);
    }
  }

  Compartment explicit_tree(const CompartmentDecl& d, int depth) {
    Compartment c;
    try {
      c = Compartment::sphere(d.name, depth, d.diameter);
    } catch (const std::exception& e) {
      error(d.loc, e.what());
      throw LowerError{};
    }
    for (const auto& child : d.children) c.children.push_back(explicit_tree(child, depth + 1));
    return c;
  }

  void apply_contents(const CompartmentDecl& d, Compartment& c) {
    for (const auto& a : d.contents) {
      const SpeciesId id = sp(a.species, a.loc);
      if (c.depth > 1 && state_->species[id].perm_class == PermClass::Particle && a.value > 0.0) {
        warning(a.loc, "particle species '" + a.species + "' placed in inner compartment '" + d.name +
                           "'; formation only embeds particles in the outermost compartment, so this "
                           "stands for a microinjection");
      }
      c.contents.set(id, kinetic() ? a.value * c.volume : a.value);
    }
    for (std::size_t i = 0; i < d.children.size() && i < c.children.size(); ++i) {
      apply_contents(d.children[i], c.children[i]);
    }
  }

  void build_mvls(SystemState& state) {
    std::vector<const CompartmentDecl*> decls;
    if (ast_.generator) {
      const GeneratorDecl& g = *ast_.generator;
      GeneratorParams params = g.params();
      if (!g.seed && ast_.run && ast_.run->seed) params.seed = *ast_.run->seed;
      try {
        state.mvls = sample_population(params, g.count(), params.seed);
      } catch (const std::exception& e) {
        error(g.loc, e.what());
        throw LowerError{};
      }
    } else {
      for (const auto& d : ast_.compartments) {
        Mvl mvl;
        mvl.root = explicit_tree(d, 1);
        mvl.morphology = d.morphology ? *d.morphology : morphology_for_height(tree_height(mvl.root));
        state.mvls.push_back(std::move(mvl));
        decls.push_back(&d);
      }
    }

    if (ast_.swelling) {
      std::map<SpeciesId, double> concentrations;
      for (const auto& a : ast_.swelling->concentrations) concentrations[sp(a.species, a.loc)] = a.value;
      try {
        for (auto& mvl : state.mvls) mvl = embed_swelling_solution(std::move(mvl), concentrations, state.species, state.mode);
      } catch (const std::exception& e) {
        error(ast_.swelling->loc, e.what());
        throw LowerError{};
      }
    }

    for (std::size_t i = 0; i < decls.size(); ++i) {
      apply_contents(*decls[i], state.mvls[i].root);
      try {
        state.mvls[i].validate();
      } catch (const std::exception& e) {
        error(decls[i]->loc, "MVL '" + decls[i]->name + "': " + e.what());
      }
    }
  }

  void build_rules(SystemState& state) {
    for (const auto& r : ast_.rules) {
      Rule rule;
      rule.name = r.name;
      for (const auto& t : r.reactants) rule.reactants.push_back(Term{sp(t.species, t.loc), t.count});
      for (const auto& t : r.catalysts) rule.catalysts.push_back(Term{sp(t.species, t.loc), t.count});
      for (const auto& t : r.products) {
        const Target target = t.target ? *t.target : r.default_target ? *r.default_target : Target::Here;
        rule.products.push_back(Product{sp(t.species, t.loc), t.count, target});
      }
      if (const auto* p = std::get_if<PriorityDecl>(&r.kinetics)) {
        rule.kinetics = AbstractLaw{p->priority};
      } else if (const auto* ma = std::get_if<MassActionDecl>(&r.kinetics)) {
        rule.kinetics = MassActionLaw{ma->k};
      } else if (const auto* mm = std::get_if<MichaelisMentenDecl>(&r.kinetics)) {
        const SpeciesId enzyme = sp(mm->enzyme, mm->loc);
        rule.kinetics = MichaelisMentenLaw{mm->kcat, mm->km, enzyme};
        const bool listed = std::any_of(rule.catalysts.begin(), rule.catalysts.end(),
                                        [&](const Term& t) { return t.species == enzyme; });
        if (!listed) rule.catalysts.push_back(Term{enzyme, 1});
      }
      try {
        validate_rule(rule, state.species, state.mode);
      } catch (const std::exception& e) {
        error(r.loc, e.what());
        continue;
      }
      state.rules.push_back(std::move(rule));
    }
  }

  void build_config(Scenario& s) {
    engine::RunConfig& c = s.config;
    if (ast_.run) {
      const RunDecl& r = *ast_.run;
      if (r.dt) c.kinetic.dt = *r.dt;
      if (r.steps) {
        c.kinetic.max_steps = *r.steps;
        c.abstract.max_steps = *r.steps;
      }
      if (r.seed) {
        c.abstract.rng_seed = *r.seed;
        s.state.rng_seed = *r.seed;
      }
      if (r.sample_every) c.sample_every = *r.sample_every;
      if (r.burst_ratio) c.kinetic.burst_volume_ratio = *r.burst_ratio;
      if (r.gas_factor) c.kinetic.gas_molar_volume_factor = *r.gas_factor;
      if (r.solver) c.kinetic.diffusion_solver = *r.solver;
      try {
        if (kinetic()) c.kinetic.validate();
      } catch (const std::exception& e) {
        error(r.loc, e.what());
      }
    }
    if (ast_.indicator) {
      c.indicator = Indicator{sp(ast_.indicator->species, ast_.indicator->loc), ast_.indicator->threshold};
    }
  }

  void build_schedule(Scenario& s) {
    for (const auto& iv : ast_.interventions) {
      engine::ScheduledIntervention out;
      out.time = iv.time;
      std::visit(
          [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, DcPulseDecl>) {
              out.op = engine::DcPulseOp{op.targets};
            } else if constexpr (std::is_same_v<T, ElectroporateDecl>) {
              out.op = engine::ElectroporateOp{op.target, op.duration, op.boost};
            } else if constexpr (std::is_same_v<T, InjectDecl>) {
              out.op = engine::InjectOp{op.compartment, sp(op.species, iv.loc), op.amount};
            } else {
              out.op = engine::InsertChannelOp{op.compartment, sp(op.species, iv.loc), op.permeability};
            }
          },
          iv.op);
      s.schedule.push_back(std::move(out));
    }
  }

  const ScenarioAst& ast_;
  std::string_view src_;
  std::vector<Diagnostic> diags_;
  SystemState* state_ = nullptr;
};

}  // namespace

LowerResult lower(const ScenarioAst& ast, std::string_view source) { return Lowerer(ast, source).run(); }

}  // namespace liposim::speclang
