// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "holoscale/error.hpp"

namespace holoscale::dsl {

enum class Tok { Number, Imaginary, Ident, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;

  bool is(char c) const { return kind == Tok::Symbol && text.size() == 1 && text[0] == c; }
  std::string describe() const {
    switch (kind) {
      case Tok::End: return "end of input";
      case Tok::Number:
      case Tok::Imaginary: return "number '" + text + "'";
      case Tok::Ident: return "identifier '" + text + "'";
      case Tok::Symbol: return "'" + text + "'";
    }
    return "?";
  }
};

/// Splits source text into tokens. `#` starts a comment running to end of line.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
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
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    const bool starts_number =
        std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])));
    if (starts_number) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.text = std::string(src.substr(i, j - i));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw SyntaxError(line, col, "number", "'" + t.text + "'");
      t.kind = Tok::Number;
      if (j < src.size() && src[j] == 'i' &&
          (j + 1 >= src.size() || !(std::isalnum(static_cast<unsigned char>(src[j + 1])) || src[j + 1] == '_'))) {
        t.kind = Tok::Imaginary;
        t.text += 'i';
        ++j;
      }
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '.'))
        ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    static constexpr std::string_view kSymbols = "+-*/^(),;=[]{}";
    if (kSymbols.find(c) == std::string_view::npos)
      throw SyntaxError(line, col, "token", std::string("'") + c + "'");
    t.kind = Tok::Symbol;
    t.text = std::string(1, c);
    advance(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace holoscale::dsl
