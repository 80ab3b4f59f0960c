#pragma once

#include <string>
#include <vector>

#include "cspec/error.hpp"
#include "cspec/rewrite/expr.hpp"

namespace cspec::rewrite {

class ParseError : public Error {
public:
  ParseError(int column, std::vector<std::string> expected, const std::string& detail = {});
  /// 1-based column of the offending character (one past the end on EOF).
  int column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  int column_;
  std::vector<std::string> expected_;
};

/// Grammar (whitespace-insensitive, '*' required between factors):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | symbol | 'delta' | '|x|' | '(' expr ')'
///            | ('lap' | 'exp' | 'sin' | 'cos' | 'sqrt') '(' expr ')'
///            | 'd/db' '(' expr ')' | '<' expr ',' '(' name ')' '>'
/// Symbols: hbar m alpha b E pi. Decimal literals are read as exact rationals.
Expr parse(const std::string& text);

}  // namespace cspec::rewrite
