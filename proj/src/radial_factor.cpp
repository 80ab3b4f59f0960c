#include "cspec/radial_factor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "cspec/error.hpp"

namespace cspec::dist {

Jet operator+(const Jet& a, const Jet& b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

Jet operator*(const Jet& a, const Jet& b) {
  return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
          a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}

Jet operator*(double s, const Jet& a) { return {s * a.value, s * a.d1, s * a.d2}; }

RadialFactor::RadialFactor(std::string name, Evaluator jet, std::optional<double> slope_at_zero)
    : name_(std::move(name)), jet_(std::move(jet)), slope_(slope_at_zero) {
  if (!jet_) throw InvalidParameter("RadialFactor: missing evaluator");
}

RadialFactor RadialFactor::constant(double c) {
  std::ostringstream os;
  os << c;
  return RadialFactor(os.str(), [c](double) { return Jet{c, 0.0, 0.0}; }, 0.0);
}

RadialFactor RadialFactor::exponential(double b) {
  std::ostringstream os;
  os << "exp(-" << b << "*|x|)";
  return RadialFactor(
      os.str(),
      [b](double r) {
        const double e = std::exp(-b * r);
        return Jet{e, -b * e, b * b * e};
      },
      -b);
}

RadialFactor RadialFactor::abs_power(int n) {
  if (n < 0) throw InvalidParameter("RadialFactor::abs_power: exponent must be >= 0");
  std::ostringstream os;
  os << "|x|^" << n;
  return RadialFactor(
      os.str(),
      [n](double r) {
        if (n == 0) return Jet{1.0, 0.0, 0.0};
        if (n == 1) return Jet{r, 1.0, 0.0};
        return Jet{std::pow(r, n), n * std::pow(r, n - 1), n * (n - 1.0) * std::pow(r, n - 2)};
      },
      n == 1 ? 1.0 : 0.0);
}

RadialFactor RadialFactor::polynomial(std::vector<double> coeffs) {
  std::ostringstream os;
  os << "poly(";
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "," : "") << coeffs[k];
  os << ")";
  const double slope = coeffs.size() > 1 ? coeffs[1] : 0.0;
  return RadialFactor(
      os.str(),
      [c = std::move(coeffs)](double r) {
        // Horner on value, first and second derivative together.
        Jet j;
        for (std::size_t k = c.size(); k-- > 0;) {
          j.d2 = j.d2 * r + 2.0 * j.d1;
          j.d1 = j.d1 * r + j.value;
          j.value = j.value * r + c[k];
        }
        return j;
      },
      slope);
}

RadialFactor RadialFactor::cos_r_squared() {
  return RadialFactor(
      "cos(|x|^2)",
      [](double r) {
        const double s = r * r;
        return Jet{std::cos(s), -2.0 * r * std::sin(s),
                   -2.0 * std::sin(s) - 4.0 * s * std::cos(s)};
      },
      0.0);
}

RadialFactor RadialFactor::product(const RadialFactor& a, const RadialFactor& b) {
  std::optional<double> slope;
  if (a.slope_ && b.slope_)
    slope = *a.slope_ * b.value_at_zero() + a.value_at_zero() * *b.slope_;
  return RadialFactor(
      a.name_ + "*" + b.name_, [ja = a.jet_, jb = b.jet_](double r) { return ja(r) * jb(r); },
      slope);
}

}  // namespace cspec::dist
