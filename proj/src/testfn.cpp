#include "cspec/testfn.hpp"

#include <cmath>
#include <numbers>

#include "cspec/error.hpp"
#include "cspec/quad.hpp"

namespace cspec::testfn {

namespace {

RadialJet standard_bump_jet(double rho, double R) {
  const double R2 = R * R;
  const double u = 1.0 - rho * rho / R2;
  if (u <= 0.0) return {};
  const double p = std::exp(1.0 - 1.0 / u);
  const double q = -2.0 * p / (R2 * u * u);
  const double d1 = rho * q;
  const double dq = -2.0 / R2 * (d1 / (u * u) + 4.0 * rho * p / (R2 * u * u * u));
  return {p, d1, q + rho * dq, q};
}

RadialJet polynomial_bump_jet(double rho, double R) {
  const double R2 = R * R;
  const double u = 1.0 - rho * rho / R2;
  if (u <= 0.0) return {};
  const double q = -8.0 * u * u * u / R2;
  const double dq = 48.0 * rho * u * u / (R2 * R2);
  return {u * u * u * u, rho * q, q + rho * dq, q};
}

// f(t) = exp(-1/t) for t > 0 together with f' and f''.
struct StepJet {
  double f, d1, d2;
};
StepJet step_jet(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  const double f = std::exp(-1.0 / t);
  const double t2 = t * t;
  return {f, f / t2, f * (1.0 / (t2 * t2) - 2.0 / (t2 * t))};
}

RadialJet plateau_jet(double rho, double inner, double width) {
  const double L = 2.0 * width;
  if (rho <= inner) return {1.0, 0.0, 0.0, 0.0};
  if (rho >= inner + L) return {};
  const double t = (rho - inner) / L;
  const StepJet a = step_jet(1.0 - t);
  const StepJet b = step_jet(t);
  const double p = a.f, dp = -a.d1, ddp = a.d2;
  const double D = a.f + b.f, dD = dp + b.d1, ddD = ddp + b.d2;
  const double num1 = dp * D - p * dD;
  const double s1 = num1 / (D * D);
  const double s2 = (ddp * D - p * ddD) / (D * D) - 2.0 * dD * num1 / (D * D * D);
  const double d1 = s1 / L;
  return {p / D, d1, s2 / (L * L), d1 / rho};
}

double unit_mollifier_mass() {
  static const double mass = quad::integrate_radial_once(
      [](double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; },
      quad::RadialGrid(1.0, 64, 20));
  return mass;
}

}  // namespace

TestFunction::TestFunction(Profile p, const Vec3& c, double support, double inner, double width)
    : profile_(p), center_(c), support_radius_(support), inner_radius_(inner),
      transition_width_(width) {}

TestFunction TestFunction::standard_bump(const Vec3& center, double support_radius) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    throw InvalidParameter("bump: support radius must be positive");
  return TestFunction(Profile::StandardBump, center, support_radius, 0.0, 0.0);
}

TestFunction TestFunction::polynomial_bump(const Vec3& center, double support_radius) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    throw InvalidParameter("polynomial bump: support radius must be positive");
  return TestFunction(Profile::PolynomialBump, center, support_radius, 0.0, 0.0);
}

RadialJet TestFunction::radial(double rho) const {
  RadialJet j;
  switch (profile_) {
    case Profile::StandardBump:
      j = standard_bump_jet(rho, support_radius_);
      break;
    case Profile::PolynomialBump:
      j = polynomial_bump_jet(rho, support_radius_);
      break;
    case Profile::Plateau:
      j = plateau_jet(rho, inner_radius_, transition_width_);
      break;
  }
  j.value *= amplitude_;
  j.d1 *= amplitude_;
  j.d2 *= amplitude_;
  j.d1_over_rho *= amplitude_;
  return j;
}

double TestFunction::value(const Vec3& x) const {
  const double rho = norm(x - center_);
  if (rho >= support_radius_) return 0.0;
  return radial(rho).value;
}

Vec3 TestFunction::gradient(const Vec3& x) const {
  const Vec3 d = x - center_;
  const double rho = norm(d);
  if (rho >= support_radius_) return {0.0, 0.0, 0.0};
  return radial(rho).d1_over_rho * d;
}

double TestFunction::laplacian(const Vec3& x) const {
  const double rho = norm(x - center_);
  if (rho >= support_radius_) return 0.0;
  const RadialJet j = radial(rho);
  return j.d2 + 2.0 * j.d1_over_rho;
}

bool TestFunction::centered_at_origin() const noexcept {
  return center_[0] == 0.0 && center_[1] == 0.0 && center_[2] == 0.0;
}

TestFunction TestFunction::scaled(double k) const {
  TestFunction out = *this;
  out.amplitude_ *= k;
  return out;
}

TestFunction bump_new(const Vec3& center, double support_radius) {
  return TestFunction::standard_bump(center, support_radius);
}

PlateauFunction::PlateauFunction(double inner_radius, double transition_width)
    : fn_(Profile::Plateau, {0.0, 0.0, 0.0}, inner_radius + 2.0 * transition_width,
          inner_radius, transition_width) {
  if (!(inner_radius > 0.0) || !(transition_width > 0.0) || !std::isfinite(inner_radius) ||
      !std::isfinite(transition_width))
    throw InvalidParameter("plateau: inner radius and transition width must be positive");
}

PlateauFunction plateau_new(double inner_radius, double transition_width) {
  return PlateauFunction(inner_radius, transition_width);
}

Mollifier::Mollifier(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidParameter("mollifier: epsilon must be positive");
  scale_ = 1.0 / (unit_mollifier_mass() * epsilon * epsilon * epsilon);
}

double Mollifier::radial_value(double rho) const {
  const double s = rho / epsilon_;
  if (s >= 1.0) return 0.0;
  return scale_ * std::exp(-1.0 / (1.0 - s * s));
}

double Mollifier::value(const Vec3& x) const { return radial_value(norm(x)); }

}  // namespace cspec::testfn
