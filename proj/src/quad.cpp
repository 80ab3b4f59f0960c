#include "cspec/quad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "cspec/error.hpp"

namespace cspec::quad {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

[[noreturn]] void throw_non_finite(double r, double value) {
  std::ostringstream os;
  os.precision(17);
  os << "non-finite integrand value " << value << " at radius r = " << r;
  throw NumericalDomainError(os.str());
}

}  // namespace

LegendreRule gauss_legendre(int n) {
  if (n < 1) throw InvalidParameter("gauss_legendre: order must be >= 1");
  LegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    const double pn = (n == 1) ? x : p1;
    const double pm = (n == 1) ? 1.0 : p0;
    dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

RadialGrid::RadialGrid(double r_max, int panels, int nodes_per_panel, double r_min)
    : r_min_(r_min), r_max_(r_max), panels_(panels), nodes_per_panel_(nodes_per_panel) {
  if (!(r_max > 0.0) || !(r_min >= 0.0) || !(r_max > r_min))
    throw InvalidParameter("RadialGrid: need 0 <= r_min < r_max");
  if (panels < 1 || nodes_per_panel < 1)
    throw InvalidParameter("RadialGrid: panels and nodes_per_panel must be positive");
  const LegendreRule gl = gauss_legendre(nodes_per_panel);
  const double h = (r_max - r_min) / panels;
  nodes_.reserve(static_cast<std::size_t>(panels) * nodes_per_panel);
  weights_.reserve(nodes_.capacity());
  for (int p = 0; p < panels; ++p) {
    const double a = r_min + p * h;
    for (int k = 0; k < nodes_per_panel; ++k) {
      nodes_.push_back(a + 0.5 * h * (gl.nodes[k] + 1.0));
      weights_.push_back(0.5 * h * gl.weights[k]);
    }
  }
}

RadialGrid RadialGrid::refined() const {
  return RadialGrid(r_max_, 2 * panels_, nodes_per_panel_, r_min_);
}

double integrate_radial_once(const RadialIntegrand& f, const RadialGrid& grid) {
  const auto r = grid.nodes();
  const auto w = grid.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double v = f(r[i]);
    if (!std::isfinite(v)) throw_non_finite(r[i], v);
    sum += w[i] * v * r[i] * r[i];
  }
  return kFourPi * sum;
}

QuadResult integrate_radial(const RadialIntegrand& f, const RadialGrid& grid) {
  const double coarse = integrate_radial_once(f, grid);
  const double fine = integrate_radial_once(f, grid.refined());
  return {fine, std::abs(fine - coarse)};
}

QuadResult integrate_graded(const std::function<double(double)>& f, double upper,
                            double scale, int nodes_per_panel) {
  if (!(upper > 0.0) || !(scale > 0.0))
    throw InvalidParameter("integrate_graded: upper and scale must be positive");
  std::vector<double> edges{0.0};
  for (double e = scale; e < upper; e *= 2.0) edges.push_back(e);
  edges.push_back(upper);

  auto pass = [&](int n) {
    const LegendreRule gl = gauss_legendre(n);
    double sum = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double a = edges[p], b = edges[p + 1];
      const double half = 0.5 * (b - a);
      for (int k = 0; k < n; ++k) {
        const double x = a + half * (gl.nodes[k] + 1.0);
        const double v = f(x);
        if (!std::isfinite(v)) throw_non_finite(x, v);
        sum += half * gl.weights[k] * v;
      }
    }
    return sum;
  };
  const double coarse = pass(nodes_per_panel);
  const double fine = pass(2 * nodes_per_panel);
  return {fine, std::abs(fine - coarse)};
}

SphereRule::SphereRule(int polar_order, int azimuthal_count)
    : polar_order_(polar_order), azimuthal_count_(azimuthal_count) {
  if (polar_order < 1 || azimuthal_count < 1)
    throw InvalidParameter("SphereRule: orders must be positive");
  const LegendreRule gl = gauss_legendre(polar_order);
  directions_.reserve(static_cast<std::size_t>(polar_order) * azimuthal_count);
  weights_.reserve(directions_.capacity());
  for (int i = 0; i < polar_order; ++i) {
    const double ct = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < azimuthal_count; ++j) {
      const double ph = 2.0 * std::numbers::pi * (j + 0.5) / azimuthal_count;
      directions_.push_back({st * std::cos(ph), st * std::sin(ph), ct});
      weights_.push_back(0.5 * gl.weights[i] / azimuthal_count);
    }
  }
}

double sphere_average(const std::function<double(const Vec3&)>& h, double radius,
                      const SphereRule& rule) {
  if (!(radius > 0.0)) throw InvalidParameter("sphere_average: radius must be positive");
  const auto dirs = rule.directions();
  const auto w = rule.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double v = h(radius * dirs[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "sphere_average: non-finite field value on sphere of radius " << radius;
      throw NumericalDomainError(os.str());
    }
    acc += w[i] * v;
  }
  return acc;
}

PoleFit pole_fit(std::span<const RadialSample> samples, int basis_size) {
  if (basis_size < 2) throw InvalidParameter("pole_fit: basis needs at least {1/r, 1}");
  const std::size_t needed = std::max<std::size_t>(4, basis_size);
  if (samples.size() < needed) {
    std::ostringstream os;
    os << "pole_fit: need at least " << needed << " samples, got " << samples.size();
    throw InvalidParameter(os.str());
  }
  std::vector<double> radii;
  radii.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.radius > 0.0) || !std::isfinite(s.radius))
      throw InvalidParameter("pole_fit: radii must be positive and finite");
    if (!std::isfinite(s.value)) {
      std::ostringstream os;
      os << "pole_fit: non-finite sample at r = " << s.radius;
      throw NumericalDomainError(os.str());
    }
    radii.push_back(s.radius);
  }
  std::sort(radii.begin(), radii.end());
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] - radii[i - 1] <= 1e-12 * radii[i])
      throw InvalidParameter("pole_fit: coincident radii");

  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  const Eigen::Index k = basis_size;
  Eigen::MatrixXd m(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = samples[i].radius;
    m(i, 0) = 1.0 / r;
    double p = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) {
      m(i, j) = p;
      p *= r;
    }
    y(i) = samples[i].value;
  }
  // Column equilibration keeps 1/r and r^4 columns comparable for the QR.
  Eigen::VectorXd scale = m.cwiseAbs().colwise().maxCoeff().transpose();
  Eigen::MatrixXd ms = m * scale.cwiseInverse().asDiagonal();
  Eigen::VectorXd c = ms.colPivHouseholderQr().solve(y);
  c = c.cwiseQuotient(scale);
  const Eigen::VectorXd resid = m * c - y;

  PoleFit fit;
  fit.basis_size = basis_size;
  fit.coefficients.assign(c.data(), c.data() + k);
  fit.pole_coeff = c(0);
  fit.finite_part = c(1);
  fit.slope = k > 2 ? c(2) : 0.0;
  fit.rms_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  return fit;
}

PoleFit adaptive_pole_fit(std::span<const RadialSample> samples,
                          const AdaptiveFitOptions& options) {
  const int cap = std::min<int>(options.max_terms, static_cast<int>(samples.size()) - 1);
  int terms = std::min(options.min_terms, std::max(cap, 2));
  PoleFit fit = pole_fit(samples, terms);
  double peak = 0.0;
  for (const auto& s : samples) peak = std::max(peak, std::abs(s.value));
  while (terms < cap && fit.rms_residual > options.relative_rms_target * peak) {
    ++terms;
    fit = pole_fit(samples, terms);
  }
  return fit;
}

std::vector<double> default_radii_ladder() {
  std::vector<double> radii;
  for (int k = 0; k < 8; ++k) radii.push_back(0.1 * std::ldexp(1.0, -k));
  return radii;
}

}  // namespace cspec::quad
