#pragma once

// Test functions with closed-form derivatives. Every profile is radial about
// its center, phi(x) = amplitude * P(|x - center|), so gradient and Laplacian
// follow from P, P' and P'' without numerical differentiation.

#include "cspec/vec3.hpp"

namespace cspec::testfn {

enum class Profile {
  StandardBump,    // e * exp(-1 / (1 - s^2)), s = rho / R; C-infinity
  PolynomialBump,  // (1 - s^2)^4; C^3 at the support edge, exact for polynomial checks
  Plateau,         // 1 on the inner ball, smooth step to 0 over 2 * width
};

/// Radial profile value and its first two derivatives in rho. `d1_over_rho`
/// is P'(rho) / rho, which stays finite at rho = 0.
struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d1_over_rho = 0.0;
};

class TestFunction {
public:
  Vec3 center() const noexcept { return center_; }
  double support_radius() const noexcept { return support_radius_; }
  Profile profile() const noexcept { return profile_; }
  double amplitude() const noexcept { return amplitude_; }

  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;
  double laplacian(const Vec3& x) const;

  /// Profile data as a function of rho = |x - center| (amplitude included).
  RadialJet radial(double rho) const;

  /// True when the center is the origin, so spherical means about 0 reduce to
  /// the profile itself.
  bool centered_at_origin() const noexcept;

  /// Copy with amplitude multiplied by k.
  TestFunction scaled(double k) const;

  static TestFunction standard_bump(const Vec3& center, double support_radius);
  static TestFunction polynomial_bump(const Vec3& center, double support_radius);

private:
  friend class PlateauFunction;
  TestFunction(Profile p, const Vec3& c, double support, double inner, double width);

  Profile profile_;
  Vec3 center_;
  double support_radius_;
  double inner_radius_ = 0.0;
  double transition_width_ = 0.0;
  double amplitude_ = 1.0;
};

/// Standard bump exp(-1 / (1 - |x-c|^2 / R^2)) normalized to value 1 at c.
/// Throws InvalidParameter unless support_radius > 0.
TestFunction bump_new(const Vec3& center, double support_radius);

/// Smooth plateau: 1 for |x| <= inner, 0 for |x| >= inner + 2 * width, with
/// the transition f(1-t) / (f(1-t) + f(t)), f(t) = exp(-1/t).
class PlateauFunction {
public:
  PlateauFunction(double inner_radius, double transition_width);

  double inner_radius() const noexcept { return fn_.inner_radius_; }
  double transition_width() const noexcept { return fn_.transition_width_; }
  double outer_radius() const noexcept { return fn_.support_radius_; }
  double value(const Vec3& x) const { return fn_.value(x); }
  double radial_value(double rho) const { return fn_.radial(rho).value; }
  const TestFunction& as_test_function() const noexcept { return fn_; }

private:
  TestFunction fn_;
};

PlateauFunction plateau_new(double inner_radius, double transition_width);

/// Unit-mass mollifier C * eps^-3 * exp(-1 / (1 - |x|^2 / eps^2)) on the ball
/// of radius eps.
class Mollifier {
public:
  explicit Mollifier(double epsilon);

  double epsilon() const noexcept { return epsilon_; }
  double value(const Vec3& x) const;
  double radial_value(double rho) const;

private:
  double epsilon_;
  double scale_;
};

}  // namespace cspec::testfn
