#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cspec::dist {

/// Value and first two radial derivatives of a scalar profile at one radius.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator*(double s, const Jet& a);

/// Radial factor g(|x|) multiplying a singular distribution. Carries its
/// closed-form derivatives and, when known, the one-sided slope g'(0+), which
/// is what the finite-part product with delta/|x| depends on.
class RadialFactor {
public:
  using Evaluator = std::function<Jet(double)>;

  /// `jet` must be valid for r > 0 and at r = 0 (as the right limit).
  /// Leave `slope_at_zero` empty when g'(0+) does not exist; such factors are
  /// rejected by the singular pairing.
  RadialFactor(std::string name, Evaluator jet, std::optional<double> slope_at_zero);

  const std::string& name() const noexcept { return name_; }
  Jet jet(double r) const { return jet_(r); }
  double value(double r) const { return jet_(r).value; }
  double value_at_zero() const { return jet_(0.0).value; }
  std::optional<double> slope_at_zero() const noexcept { return slope_; }

  static RadialFactor constant(double c);
  /// exp(-b r)
  static RadialFactor exponential(double b);
  /// r^n for integer n >= 0.
  static RadialFactor abs_power(int n);
  /// sum_k coeffs[k] r^k
  static RadialFactor polynomial(std::vector<double> coeffs);
  /// cos(r^2)
  static RadialFactor cos_r_squared();
  static RadialFactor product(const RadialFactor& a, const RadialFactor& b);

private:
  std::string name_;
  Evaluator jet_;
  std::optional<double> slope_;
};

}  // namespace cspec::dist
