#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "liposim/speclang/diagnostic.hpp"

namespace liposim::speclang::detail {

enum class TokenKind {
  Identifier,
  Number,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Colon,
  Comma,
  Plus,
  Arrow,
  At,
  Equals,
  Slash,
  End,
};

std::string_view describe(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceLoc loc;
  bool first_on_line = false;
  bool glued = false;  // no whitespace before it
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with End
  std::vector<Diagnostic> diagnostics;
};

// Identifiers: [A-Za-z_][A-Za-z0-9_.]* . Numbers: optional '-', digits,
// optional fraction and exponent. '#' starts a comment to end of line.
LexResult lex(std::string_view source);

}  // namespace liposim::speclang::detail
