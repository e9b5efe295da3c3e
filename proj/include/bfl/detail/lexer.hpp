#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "bfl/error.hpp"

namespace bfl::detail {

enum class TokenKind {
  Identifier,  // bare [A-Za-z_][A-Za-z0-9_]*
  Quoted,      // "any text"
  Number,
  Punct,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!std::isalpha(head) && head != '_') return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && u != '_') return false;
  }
  return true;
}

/// Renders a name so that the lexer reads it back as a single name token.
inline std::string quote_if_needed(std::string_view name) {
  if (is_identifier(name)) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Shared tokenizer for the fault-tree and formula languages. Punctuation is
/// matched longest-first; `#` starts a comment that runs to end of line.
inline std::vector<Token> tokenize(std::string_view src) {
  static constexpr std::string_view kPuncts[] = {
      "<=>", ":=", "=>", "<=", ">=", "!=", "(", ")", "[", "]", ",", ";",
      "/",   "=",  "<",  ">",  "!",  "&",  "|",
  };

  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };

  while (i < src.size()) {
    char c = src[i];
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }

    Token tok;
    tok.line = line;
    tok.column = col;

    if (std::isalpha(uc) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      tok.kind = TokenKind::Identifier;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(uc)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      tok.kind = TokenKind::Number;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      advance(1);
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '\n') break;
        if (d == '"') {
          closed = true;
          advance(1);
          break;
        }
        if (d == '\\' && i + 1 < src.size()) {
          advance(1);
          d = src[i];
        }
        text.push_back(d);
        advance(1);
      }
      if (!closed) throw ParseError(tok.line, tok.column, "unterminated quoted name");
      if (text.empty()) throw ParseError(tok.line, tok.column, "empty quoted name");
      tok.kind = TokenKind::Quoted;
      tok.text = std::move(text);
    } else {
      bool matched = false;
      for (auto p : kPuncts) {
        if (src.substr(i, p.size()) == p) {
          tok.kind = TokenKind::Punct;
          tok.text = std::string(p);
          advance(p.size());
          matched = true;
          break;
        }
      }
      if (!matched)
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(tok));
  }

  Token end;
  end.kind = TokenKind::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t j = pos_ + ahead;
    return j < tokens_.size() ? tokens_[j] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
  }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  const Token& expect(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    return next();
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.column, what + ", found " + found);
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace bfl::detail
