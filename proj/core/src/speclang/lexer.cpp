#include "lexer.hpp"

namespace liposim::speclang::detail {

namespace {

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c) || c == '.'; }

}  // namespace

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Comma: return "','";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::At: return "'@'";
    case TokenKind::Equals: return "'='";
    case TokenKind::Slash: return "'/'";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

LexResult lex(std::string_view src) {
  LexResult out;
  std::size_t i = 0;
  int line = 1;
  int column = 1;
  bool line_start = true;
  bool space_before = true;

  const auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  const auto push = [&](TokenKind kind, std::size_t length) {
    Token t{kind, std::string(src.substr(i, length)), SourceLoc{line, column}, line_start, !space_before};
    out.tokens.push_back(std::move(t));
    advance(length);
    line_start = false;
    space_before = false;
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      advance(1);
      line_start = true;
      space_before = true;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      space_before = true;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      space_before = true;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t n = 1;
      while (i + n < src.size() && is_ident_char(src[i + n])) ++n;
      push(TokenKind::Identifier, n);
      continue;
    }
    const bool negative = c == '-' && i + 1 < src.size() && is_digit(src[i + 1]);
    if (is_digit(c) || negative) {
      std::size_t n = negative ? 1 : 0;
      while (i + n < src.size() && is_digit(src[i + n])) ++n;
      if (i + n + 1 < src.size() && src[i + n] == '.' && is_digit(src[i + n + 1])) {
        ++n;
        while (i + n < src.size() && is_digit(src[i + n])) ++n;
      }
      if (i + n < src.size() && (src[i + n] == 'e' || src[i + n] == 'E')) {
        std::size_t m = n + 1;
        if (i + m < src.size() && (src[i + m] == '+' || src[i + m] == '-')) ++m;
        if (i + m < src.size() && is_digit(src[i + m])) {
          while (i + m < src.size() && is_digit(src[i + m])) ++m;
          n = m;
        }
      }
      push(TokenKind::Number, n);
      continue;
    }
    switch (c) {
      case '{': push(TokenKind::LBrace, 1); continue;
      case '}': push(TokenKind::RBrace, 1); continue;
      case '(': push(TokenKind::LParen, 1); continue;
      case ')': push(TokenKind::RParen, 1); continue;
      case ':': push(TokenKind::Colon, 1); continue;
      case ',': push(TokenKind::Comma, 1); continue;
      case '+': push(TokenKind::Plus, 1); continue;
      case '@': push(TokenKind::At, 1); continue;
      case '=': push(TokenKind::Equals, 1); continue;
      case '/': push(TokenKind::Slash, 1); continue;
      default: break;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      push(TokenKind::Arrow, 2);
      continue;
    }
    // Unknown byte (or a run of non-ASCII bytes): report once and skip it.
    const SourceLoc loc{line, column};
    std::size_t n = 1;
    if (static_cast<unsigned char>(c) >= 0x80) {
      while (i + n < src.size() && static_cast<unsigned char>(src[i + n]) >= 0x80) ++n;
    }
    std::string shown;
    if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f) {
      static constexpr char kHex[] = "0123456789abcdef";
      shown = std::string("byte 0x") + kHex[(static_cast<unsigned char>(c) >> 4) & 0xf] +
              kHex[static_cast<unsigned char>(c) & 0xf];
    } else {
      shown = std::string("'") + c + "'";
    }
    out.diagnostics.push_back(make_diagnostic(Severity::Error, loc, "unexpected character " + shown, src));
    advance(n);
    space_before = true;
  }
  out.tokens.push_back(Token{TokenKind::End, {}, SourceLoc{line, column}, true, false});
  return out;
}

}  // namespace liposim::speclang::detail
