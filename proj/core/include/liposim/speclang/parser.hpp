#pragma once

// Scenario (.psys) parser. Line-oriented statements with braces for
// nesting; '#' comments; units are mandatory (um, fL, mM, s, um/s, amol).
// The grammar reference lives in docs/grammar.md.

#include <optional>
#include <string_view>
#include <vector>

#include "liposim/speclang/ast.hpp"
#include "liposim/speclang/diagnostic.hpp"

namespace liposim::speclang {

// Exactly one of the two is set: a resolved AST with no diagnostics, or at
// least one error diagnostic.
struct ParseResult {
  std::optional<ScenarioAst> ast;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return ast.has_value(); }
};

// Total: any input yields a result, never an exception.
ParseResult parse(std::string_view source);

// Deepest brace nesting the parser follows before giving up.
inline constexpr int kMaxSyntaxNesting = 64;

}  // namespace liposim::speclang
