#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace liposim::speclang {

// 1-based position. Locations never take part in AST equality, so a
// reformatted file still compares equal to the original.
struct SourceLoc {
  int line = 1;
  int column = 1;

  bool operator==(const SourceLoc&) const { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;
  int column = 1;
  std::string message;
  std::string excerpt;  // the offending source line, without newline
};

// The text of line `line` (1-based) of `source`; empty when out of range.
std::string source_line(std::string_view source, int line);

Diagnostic make_diagnostic(Severity severity, SourceLoc loc, std::string message, std::string_view source);

// "name:line:col: error: message", the excerpt and a caret under the column.
std::string format_diagnostic(const Diagnostic& d, std::string_view source_name);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace liposim::speclang
