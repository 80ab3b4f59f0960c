#pragma once

// Exact scalar coefficients: sums of monomials with rational coefficients over
// the symbols {hbar, m, alpha, b, E, pi} and prime radicals (2^(1/2), ...),
// every base carrying a rational exponent.

#include <map>
#include <optional>
#include <string>

#include <boost/rational.hpp>

namespace cspec::rewrite {

using Rational = boost::rational<long long>;
using Bindings = std::map<std::string, double>;

/// Product of bases raised to nonzero rational exponents. Numeric bases are
/// primes with exponents in (0, 1); integer parts live in the coefficient.
using Monomial = std::map<std::string, Rational>;

class Scalar {
public:
  Scalar() = default;
  static Scalar number(Rational q);
  static Scalar symbol(const std::string& name);

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_monomial() const noexcept { return terms_.size() == 1; }
  /// The value when the scalar is a plain rational (no symbols or radicals).
  std::optional<Rational> as_rational() const;
  bool depends_on(const std::string& symbol) const;

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);

  /// Raises to a rational power. Non-integer or negative exponents require a
  /// monomial; throws InvalidParameter otherwise or on integer overflow.
  Scalar pow(Rational e) const;
  /// Division by a monomial.
  Scalar divided_by(const Scalar& d) const;

  Scalar derivative(const std::string& symbol) const;

  /// pi defaults to its numeric value; other symbols must be bound.
  double evaluate(const Bindings& bindings) const;

  /// Normal-form text, monomials in lexicographic order; parses back to an
  /// equal scalar.
  std::string to_string() const;
  /// Whether to_string() needs parentheses inside a product.
  bool needs_parens() const;
  /// Leading coefficient negative: printed with a leading '-'.
  bool is_negative_monomial() const;

  const std::map<Monomial, Rational>& terms() const noexcept { return terms_; }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return a.terms_ < b.terms_; }

private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

}  // namespace cspec::rewrite
