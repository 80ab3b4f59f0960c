#include "cspec/rewrite/scalar.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "cspec/error.hpp"

namespace cspec::rewrite {

namespace {

const Rational kZero(0);
const Rational kOne(1);

bool is_numeric_base(const std::string& s) {
  return !s.empty() && std::isdigit(static_cast<unsigned char>(s.front()));
}

long long checked_mul(long long a, long long b) {
  long long out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw InvalidParameter("scalar arithmetic overflow");
  return out;
}

Rational checked_mul(const Rational& a, const Rational& b) {
  // Cross-reduce first so the products stay small.
  const Rational x(a.numerator(), b.denominator());
  const Rational y(b.numerator(), a.denominator());
  return Rational(checked_mul(x.numerator(), y.numerator()),
                  checked_mul(x.denominator(), y.denominator()));
}

Rational checked_add(const Rational& a, const Rational& b) {
  long long n1 = 0, n2 = 0, n = 0, d = 0;
  if (__builtin_mul_overflow(a.numerator(), b.denominator(), &n1) ||
      __builtin_mul_overflow(b.numerator(), a.denominator(), &n2) ||
      __builtin_add_overflow(n1, n2, &n) ||
      __builtin_mul_overflow(a.denominator(), b.denominator(), &d))
    throw InvalidParameter("scalar arithmetic overflow");
  return Rational(n, d);
}

Rational ipow(Rational base, long long e) {
  if (e < 0) {
    if (base == kZero) throw InvalidParameter("division by zero in scalar expression");
    base = 1 / base;
    e = -e;
  }
  Rational out(1);
  for (long long k = 0; k < e; ++k) out = checked_mul(out, base);
  return out;
}

std::vector<std::pair<long long, int>> factorize(long long n) {
  std::vector<std::pair<long long, int>> f;
  for (long long p = 2; p * p <= n; ++p) {
    int k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    if (k) f.emplace_back(p, k);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

long long floor_rational(const Rational& q) {
  long long f = q.numerator() / q.denominator();
  if (q.numerator() % q.denominator() != 0 && q.numerator() < 0) --f;
  return f;
}

/// Moves integer parts of prime-radical exponents into the coefficient.
void normalize_numeric(Monomial& m, Rational& coeff) {
  for (auto it = m.begin(); it != m.end();) {
    if (is_numeric_base(it->first)) {
      const long long k = floor_rational(it->second);
      if (k != 0) {
        coeff = checked_mul(coeff, ipow(Rational(std::stoll(it->first)), k));
        it->second -= k;
      }
    }
    if (it->second == kZero)
      it = m.erase(it);
    else
      ++it;
  }
}

std::string exponent_text(const Rational& e) {
  std::ostringstream os;
  if (e.denominator() == 1 && e.numerator() > 0) {
    os << e.numerator();
  } else if (e.denominator() == 1) {
    os << "(" << e.numerator() << ")";
  } else {
    os << "(" << e.numerator() << "/" << e.denominator() << ")";
  }
  return os.str();
}

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (const auto& [base, e] : m) {
    if (!out.empty()) out += "*";
    out += base;
    if (e != kOne) out += "^" + exponent_text(e);
  }
  return out;
}

}  // namespace

void Scalar::add_term(const Monomial& m, const Rational& c) {
  if (c == kZero) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second = checked_add(it->second, c);
    if (it->second == kZero) terms_.erase(it);
  }
}

Scalar Scalar::number(Rational q) {
  Scalar s;
  s.add_term({}, q);
  return s;
}

Scalar Scalar::symbol(const std::string& name) {
  if (name.empty() || is_numeric_base(name)) throw InvalidParameter("invalid symbol name");
  Scalar s;
  s.add_term({{name, Rational(1)}}, Rational(1));
  return s;
}

std::optional<Rational> Scalar::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

bool Scalar::depends_on(const std::string& symbol) const {
  for (const auto& [m, c] : terms_)
    if (m.count(symbol)) return true;
  return false;
}

Scalar Scalar::operator-() const {
  Scalar s = *this;
  for (auto& [m, c] : s.terms_) c = -c;
  return s;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar s = a;
  for (const auto& [m, c] : b.terms_) s.add_term(m, c);
  return s;
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar s;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      for (const auto& [base, e] : mb) m[base] += e;
      Rational c = checked_mul(ca, cb);
      normalize_numeric(m, c);
      s.add_term(m, c);
    }
  }
  return s;
}

Scalar Scalar::pow(Rational e) const {
  if (e.denominator() == 1 && e.numerator() >= 0) {
    Scalar out = number(1);
    for (long long k = 0; k < e.numerator(); ++k) out = out * *this;
    return out;
  }
  if (terms_.empty()) throw InvalidParameter("zero raised to a negative or fractional power");
  if (terms_.size() != 1)
    throw InvalidParameter("only monomials can be raised to negative or fractional powers");
  const auto& [m0, c0] = *terms_.begin();
  if (e.denominator() != 1 && c0 < kZero)
    throw InvalidParameter("fractional power of a negative coefficient");

  Monomial m;
  for (const auto& [base, x] : m0) m[base] = checked_mul(x, e);
  Rational coeff(1);
  if (e.denominator() == 1) {
    coeff = ipow(c0, e.numerator());
  } else {
    // Split the coefficient into primes so radicals stay canonical.
    const auto add_primes = [&](long long n, int sign) {
      for (const auto& [p, k] : factorize(n)) m[std::to_string(p)] += checked_mul(e, Rational(sign * k));
    };
    add_primes(c0.numerator(), 1);
    add_primes(c0.denominator(), -1);
  }
  normalize_numeric(m, coeff);
  Scalar s;
  s.add_term(m, coeff);
  return s;
}

Scalar Scalar::divided_by(const Scalar& d) const {
  if (d.is_zero()) throw InvalidParameter("division by zero in scalar expression");
  return *this * d.pow(Rational(-1));
}

Scalar Scalar::derivative(const std::string& symbol) const {
  Scalar s;
  for (const auto& [m, c] : terms_) {
    const auto it = m.find(symbol);
    if (it == m.end()) continue;
    Monomial dm = m;
    const Rational e = it->second;
    dm[symbol] -= 1;
    if (dm[symbol] == kZero) dm.erase(symbol);
    s.add_term(dm, checked_mul(c, e));
  }
  return s;
}

double Scalar::evaluate(const Bindings& bindings) const {
  double total = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = static_cast<double>(c.numerator()) / static_cast<double>(c.denominator());
    for (const auto& [base, e] : m) {
      double x = 0.0;
      if (is_numeric_base(base)) {
        x = std::stod(base);
      } else if (const auto it = bindings.find(base); it != bindings.end()) {
        x = it->second;
      } else if (base == "pi") {
        x = std::numbers::pi;
      } else {
        throw InvalidParameter("unbound symbol '" + base + "'");
      }
      v *= std::pow(x, static_cast<double>(e.numerator()) / static_cast<double>(e.denominator()));
    }
    total += v;
  }
  return total;
}

std::string Scalar::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const Rational mag = c < kZero ? -c : c;
    if (first) {
      if (c < kZero) out += "-";
    } else {
      out += c < kZero ? " - " : " + ";
    }
    first = false;
    std::ostringstream coeff;
    coeff << mag.numerator();
    if (mag.denominator() != 1) coeff << "/" << mag.denominator();
    if (m.empty()) {
      out += coeff.str();
    } else if (mag == kOne) {
      out += monomial_text(m);
    } else {
      out += coeff.str() + "*" + monomial_text(m);
    }
  }
  return out;
}

bool Scalar::needs_parens() const {
  if (terms_.size() > 1) return true;
  // A lone fraction binds fine under left-associative '*', '/' parsing.
  return false;
}

bool Scalar::is_negative_monomial() const {
  return terms_.size() == 1 && terms_.begin()->second < kZero;
}

}  // namespace cspec::rewrite
