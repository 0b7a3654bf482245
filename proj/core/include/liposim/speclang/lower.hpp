#pragma once

// Turns a parsed scenario into a ready-to-run system.

#include <optional>
#include <vector>

#include "liposim/audit.hpp"
#include "liposim/engine.hpp"
#include "liposim/speclang/ast.hpp"
#include "liposim/speclang/diagnostic.hpp"

namespace liposim::speclang {

struct Scenario {
  SystemState state;
  engine::Schedule schedule;
  engine::RunConfig config;
  std::vector<AtomTag> atoms;
};

// `scenario` is set unless an error diagnostic is present; warnings (such
// as particle species placed in inner compartments) may accompany it.
struct LowerResult {
  std::optional<Scenario> scenario;
  std::vector<Diagnostic> diagnostics;
};

// Generator blocks are sampled with sample_population(params, n, seed);
// explicit contents are applied after the swelling solution and replace it
// for the species they name. `source` only feeds diagnostic excerpts.
LowerResult lower(const ScenarioAst& ast, std::string_view source = {});

}  // namespace liposim::speclang
