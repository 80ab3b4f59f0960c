#pragma once

// Deterministic quadrature: composite Gauss-Legendre radial integrals with
// the 4*pi*r^2 spherical weight, product rules on the unit sphere, and the
// least-squares Laurent fit used to extract Hadamard finite parts.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cspec/vec3.hpp"

namespace cspec::quad {

/// Gauss-Legendre rule on [-1, 1].
struct LegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Computes the n-point rule by Newton iteration on P_n. n >= 1.
LegendreRule gauss_legendre(int n);

/// Composite Gauss-Legendre grid on (r_min, r_max] with equal-width panels.
class RadialGrid {
public:
  RadialGrid(double r_max, int panels, int nodes_per_panel, double r_min = 0.0);

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  int panels() const noexcept { return panels_; }
  int nodes_per_panel() const noexcept { return nodes_per_panel_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Node radii and plain (unweighted) interval weights.
  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// Same interval with twice the panels.
  RadialGrid refined() const;

private:
  double r_min_, r_max_;
  int panels_, nodes_per_panel_;
  std::vector<double> nodes_, weights_;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

using RadialIntegrand = std::function<double(double)>;

/// Single pass of 4*pi * sum w_i f(r_i) r_i^2. Throws NumericalDomainError on a
/// non-finite sample, naming the radius.
double integrate_radial_once(const RadialIntegrand& f, const RadialGrid& grid);

/// Integral of f(r) * 4*pi*r^2 over the grid's interval. The returned value
/// comes from the refined grid; the error estimate is the difference to the
/// coarse pass.
QuadResult integrate_radial(const RadialIntegrand& f, const RadialGrid& grid);

/// Plain integral of f over [0, upper] on panels [0, s], [s, 2s], [2s, 4s], ...
/// graded geometrically from `scale`, which should resolve the integrand's
/// smallest feature near 0. Error estimate from doubling the node count.
QuadResult integrate_graded(const std::function<double(double)>& f, double upper,
                            double scale, int nodes_per_panel = 16);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times the
/// uniform trapezoid in azimuth.
class SphereRule {
public:
  SphereRule(int polar_order, int azimuthal_count);

  int polar_order() const noexcept { return polar_order_; }
  int azimuthal_count() const noexcept { return azimuthal_count_; }
  std::span<const Vec3> directions() const noexcept { return directions_; }
  /// Weights sum to 1, so a weighted sum is the surface average.
  std::span<const double> weights() const noexcept { return weights_; }

private:
  int polar_order_, azimuthal_count_;
  std::vector<Vec3> directions_;
  std::vector<double> weights_;
};

/// (1/4pi) times the surface integral of h over the sphere |x| = radius.
double sphere_average(const std::function<double(const Vec3&)>& h, double radius,
                      const SphereRule& rule);

/// Averages of N fields evaluated together; h(x) returns all N values at x.
template <std::size_t N, typename Field>
std::array<double, N> sphere_average_n(Field&& h, double radius, const SphereRule& rule) {
  std::array<double, N> acc{};
  const auto dirs = rule.directions();
  const auto w = rule.weights();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::array<double, N> v = h(radius * dirs[i]);
    for (std::size_t k = 0; k < N; ++k) acc[k] += w[i] * v[k];
  }
  return acc;
}

struct RadialSample {
  double radius;
  double value;
};

/// Least-squares Laurent model value ~ A/r + B + C r (+ D r^2 + ...).
struct PoleFit {
  double pole_coeff = 0.0;    // A
  double finite_part = 0.0;   // B
  double slope = 0.0;         // C
  double rms_residual = 0.0;
  /// All coefficients in basis order {1/r, 1, r, r^2, ...}.
  std::vector<double> coefficients;
  int basis_size = 3;
};

/// Fits the basis {1/r, 1, r, ..., r^(basis_size-2)}. Requires at least
/// max(4, basis_size) samples at positive, pairwise distinct radii.
PoleFit pole_fit(std::span<const RadialSample> samples, int basis_size = 3);

struct AdaptiveFitOptions {
  int min_terms = 3;
  int max_terms = 6;
  /// Stop escalating once rms_residual <= target * max|value|.
  double relative_rms_target = 1e-12;
};

/// Starts at min_terms and adds powers of r while the fit is above target,
/// never using more than samples - 1 terms.
PoleFit adaptive_pole_fit(std::span<const RadialSample> samples,
                          const AdaptiveFitOptions& options = {});

/// r_k = 0.1 * 2^-k, k = 0..7.
std::vector<double> default_radii_ladder();

}  // namespace cspec::quad
