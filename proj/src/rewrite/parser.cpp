#include "cspec/rewrite/parser.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace cspec::rewrite {

namespace {

std::string describe(int column, const std::vector<std::string>& expected,
                     const std::string& detail) {
  std::string msg = "syntax error at column " + std::to_string(column);
  if (!expected.empty()) {
    msg += ": expected ";
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (k) msg += k + 1 == expected.size() ? " or " : ", ";
      msg += expected[k];
    }
  }
  if (!detail.empty()) msg += (expected.empty() ? ": " : " (") + detail + (expected.empty() ? "" : ")");
  return msg;
}

const std::set<std::string> kSymbols = {"hbar", "m", "alpha", "b", "E", "pi"};
const std::set<std::string> kFunctions = {"lap", "exp", "sin", "cos", "sqrt"};

const std::vector<std::string> kOperand = {"number", "symbol", "'delta'", "'|x|'", "'('",
                                           "function", "'d/db'", "'<'", "'-'"};

/// 1/e for expressions that have an exact inverse in the language.
std::optional<Expr> invert(const Expr& e) {
  switch (e->kind) {
    case Kind::Scalar:
      if (e->coeff.is_zero() || !e->coeff.is_monomial()) return std::nullopt;
      return scalar(e->coeff.pow(Rational(-1)));
    case Kind::AbsX: return abs_x(-e->power);
    case Kind::Exp: return exp_abs(-e->coeff);
    case Kind::Scale: {
      if (!e->coeff.is_monomial()) return std::nullopt;
      auto inner = invert(e->children[0]);
      if (!inner) return std::nullopt;
      return scale(e->coeff.pow(Rational(-1)), *inner);
    }
    case Kind::Prod: {
      std::vector<Expr> parts;
      for (const auto& f : e->children) {
        auto inv = invert(f);
        if (!inv) return std::nullopt;
        parts.push_back(*inv);
      }
      return prod(std::move(parts));
    }
    default: return std::nullopt;
  }
}

class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) fail({"operator", "end of input"});
    return e;
  }

private:
  int column() const { return static_cast<int>(pos_) + 1; }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail = {}) const {
    throw ParseError(column(), std::move(expected), detail);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail({std::string("'") + c + "'"});
  }

  bool at_word(const std::string& w) {
    skip();
    return s_.compare(pos_, w.size(), w) == 0;
  }

  Span span_from(std::size_t begin) const {
    return {static_cast<int>(begin) + 1, static_cast<int>(pos_) + 1};
  }

  Expr expr() {
    skip();
    const std::size_t begin = pos_;
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(scale(Scalar::number(-1), term()));
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : sum(std::move(terms), span_from(begin));
  }

  Expr term() {
    skip();
    const std::size_t begin = pos_;
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = prod({acc, unary()}, span_from(begin));
      } else if (peek('/') && !at_word("/db")) {
        ++pos_;
        skip();
        const std::size_t at = pos_;
        Expr d = unary();
        auto inv = invert(d);
        if (!inv) {
          pos_ = at;
          fail({}, "divisor '" + print(d) + "' has no inverse in the language");
        }
        acc = prod({acc, *inv}, span_from(begin));
      } else {
        return acc;
      }
    }
  }

  Expr unary() {
    skip();
    if (accept('-')) return scale(Scalar::number(-1), unary());
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    skip();
    const std::size_t begin = pos_;
    Expr base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t at = pos_;
    Expr ex = unary();
    std::optional<Rational> q;
    if (ex->kind == Kind::Scalar) q = ex->coeff.as_rational();
    if (!q) {
      pos_ = at;
      fail({"rational exponent"});
    }
    const Span sp = span_from(begin);
    const bool integral = q->denominator() == 1;
    switch (base->kind) {
      case Kind::Scalar:
        try {
          return scalar(base->coeff.pow(*q), sp);
        } catch (const InvalidParameter& err) {
          pos_ = at;
          fail({}, err.what());
        }
      case Kind::AbsX:
        if (integral) return abs_x(static_cast<int>(base->power * q->numerator()), sp);
        break;
      case Kind::Exp:
        if (integral) return exp_abs(base->coeff * Scalar::number(*q), sp);
        break;
      default:
        if (integral && q->numerator() > 0 && q->numerator() <= 16) {
          std::vector<Expr> copies(static_cast<std::size_t>(q->numerator()), base);
          return prod(std::move(copies), sp);
        }
        break;
    }
    pos_ = at;
    fail({"positive integer exponent"});
  }

  Expr number() {
    const std::size_t begin = pos_;
    long long num = 0, den = 1;
    const auto digit = [&](long long& acc) {
      if (__builtin_mul_overflow(acc, 10LL, &acc) ||
          __builtin_add_overflow(acc, static_cast<long long>(s_[pos_] - '0'), &acc))
        fail({}, "numeric literal too long");
      ++pos_;
    };
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) digit(num);
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        digit(num);
        if (__builtin_mul_overflow(den, 10LL, &den)) fail({}, "numeric literal too long");
      }
    }
    Rational q(num, den);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
         ((s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+') && pos_ + 2 < s_.size() &&
          std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))))) {
      ++pos_;
      int sign = 1;
      if (s_[pos_] == '-' || s_[pos_] == '+') sign = s_[pos_++] == '-' ? -1 : 1;
      int e = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + (s_[pos_++] - '0');
        if (e > 18) fail({}, "exponent too large");
      }
      long long p = 1;
      for (int k = 0; k < e; ++k) p *= 10;
      try {
        q = sign > 0 ? q * p : q / p;
      } catch (...) {
        fail({}, "numeric literal out of range");
      }
    }
    return scalar(Scalar::number(q), span_from(begin));
  }

  std::string identifier() {
    const std::size_t begin = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return s_.substr(begin, pos_ - begin);
  }

  Expr parenthesized() {
    expect('(');
    Expr e = expr();
    expect(')');
    return e;
  }

  Expr primary() {
    skip();
    const std::size_t begin = pos_;
    if (pos_ >= s_.size()) fail(kOperand);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') return parenthesized();
    if (c == '|') {
      ++pos_;
      skip();
      if (pos_ >= s_.size() || s_[pos_] != 'x') fail({"'x'"});
      ++pos_;
      expect('|');
      return abs_x(1, span_from(begin));
    }
    if (c == '<') {
      ++pos_;
      Expr inner = expr();
      expect(',');
      expect('(');
      skip();
      const std::string name = identifier();
      if (name.empty()) fail({"test-function name"});
      expect(')');
      expect('>');
      return bracket(inner, name, span_from(begin));
    }
    if (at_word("d/db")) {
      pos_ += 4;
      Expr inner = parenthesized();
      return deriv_b(inner, span_from(begin));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::string id = identifier();
      if (id == "delta") return delta(span_from(begin));
      if (kSymbols.count(id)) return scalar(Scalar::symbol(id), span_from(begin));
      if (kFunctions.count(id)) {
        skip();
        Expr arg = parenthesized();
        const Span sp = span_from(begin);
        if (id == "lap") return lap(arg, sp);
        if (id == "sqrt") {
          if (arg->kind != Kind::Scalar) {
            pos_ = begin;
            fail({}, "sqrt applies to scalar expressions only");
          }
          try {
            return scalar(arg->coeff.pow(Rational(1, 2)), sp);
          } catch (const InvalidParameter& err) {
            pos_ = begin;
            fail({}, err.what());
          }
        }
        return func(id, arg, sp);
      }
      pos_ = begin;
      fail(kOperand, "unknown identifier '" + id + "'");
    }
    fail(kOperand);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(int column, std::vector<std::string> expected, const std::string& detail)
    : Error(describe(column, expected, detail)), column_(column), expected_(std::move(expected)) {}

Expr parse(const std::string& text) { return Parser(text).run(); }

}  // namespace cspec::rewrite
