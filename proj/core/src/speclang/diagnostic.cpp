#include "liposim/speclang/diagnostic.hpp"

#include <algorithm>

namespace liposim::speclang {

std::string source_line(std::string_view source, int line) {
  if (line < 1) return {};
  std::size_t start = 0;
  for (int i = 1; i < line; ++i) {
    const auto nl = source.find('\n', start);
    if (nl == std::string_view::npos) return {};
    start = nl + 1;
  }
  auto end = source.find('\n', start);
  if (end == std::string_view::npos) end = source.size();
  std::string_view text = source.substr(start, end - start);
  if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
  return std::string(text);
}

Diagnostic make_diagnostic(Severity severity, SourceLoc loc, std::string message, std::string_view source) {
  return Diagnostic{severity, loc.line, loc.column, std::move(message), source_line(source, loc.line)};
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source_name) {
  std::string out(source_name);
  out += ':' + std::to_string(d.line) + ':' + std::to_string(d.column) + ": ";
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += d.message;
  if (!d.excerpt.empty()) {
    out += "\n  " + d.excerpt + "\n  ";
    // Keep tabs so the caret lines up under the excerpt.
    const auto width = static_cast<std::size_t>(std::max(d.column - 1, 0));
    for (std::size_t i = 0; i < width && i < d.excerpt.size(); ++i) out += d.excerpt[i] == '\t' ? '\t' : ' ';
    out += '^';
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace liposim::speclang
