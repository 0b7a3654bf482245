#pragma once

#include <string>

#include "liposim/speclang/ast.hpp"

namespace liposim::speclang {

// Canonical text: fixed statement order, two-space indentation, shortest
// round-trip numbers, optional fields omitted. parse(serialize(ast)) == ast
// and serialize is a fixed point on its own output.
std::string serialize(const ScenarioAst& ast);

}  // namespace liposim::speclang
