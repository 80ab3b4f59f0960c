#include "cspec/dist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <type_traits>

#include "cspec/error.hpp"

namespace cspec::dist {

namespace {

/// Spherical means about the origin of phi, n.grad(phi) and lap(phi).
struct SphericalMeans {
  double value = 0.0;
  double radial_derivative = 0.0;
  double laplacian = 0.0;
};

class MeanEvaluator {
public:
  MeanEvaluator(const testfn::TestFunction& phi, const PairingConfig& cfg)
      : phi_(phi), rule_(cfg.polar_order, cfg.azimuthal_count) {}

  SphericalMeans at(double r) const {
    if (phi_.centered_at_origin()) {
      if (r >= phi_.support_radius()) return {};
      const auto j = phi_.radial(r);
      return {j.value, j.d1, j.d2 + 2.0 * j.d1_over_rho};
    }
    const double c = norm(phi_.center());
    if (r <= c - phi_.support_radius() || r >= c + phi_.support_radius()) return {};
    const auto m = quad::sphere_average_n<3>(
        [this, r](const Vec3& x) {
          return std::array<double, 3>{phi_.value(x), dot(x, phi_.gradient(x)) / r,
                                       phi_.laplacian(x)};
        },
        r, rule_);
    return {m[0], m[1], m[2]};
  }

  /// Mean of phi (order 0) or of lap(phi) (order 1).
  double probe(double r, int order) const {
    const SphericalMeans m = at(r);
    return order == 0 ? m.value : m.laplacian;
  }

  double probe_at_origin(int order) const {
    const Vec3 zero{0.0, 0.0, 0.0};
    return order == 0 ? phi_.value(zero) : phi_.laplacian(zero);
  }

  double reach_min() const {
    return std::max(0.0, norm(phi_.center()) - phi_.support_radius());
  }
  double reach_max() const { return norm(phi_.center()) + phi_.support_radius(); }

private:
  const testfn::TestFunction& phi_;
  quad::SphereRule rule_;
};

void check_kernel_integrable(const std::string& name, const std::function<double(double)>& k) {
  double reference = 0.0;
  double innermost = 0.0;
  for (int e = 2; e <= 8; ++e) {
    const double r = std::pow(10.0, -e);
    const double v = k(r);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "kernel " << name << ": non-finite value at r = " << r;
      throw NumericalDomainError(os.str());
    }
    const double m = std::abs(v) * r * r;
    if (e <= 4) reference = std::max(reference, m);
    innermost = m;
  }
  if (innermost > 8.0 * reference + 1e-300) {
    throw NumericalDomainError("kernel " + name +
                               ": |k(r)| r^2 grows as r -> 0; not integrable against r^2");
  }
}

BracketResult scaled(BracketResult r, double s) {
  r.value *= s;
  r.error_estimate *= std::abs(s);
  return r;
}

int method_rank(Method m) {
  switch (m) {
    case Method::PointEval: return 0;
    case Method::Quadrature: return 1;
    case Method::WeakLaplacian: return 2;
    case Method::FinitePart: return 3;
  }
  return 0;
}

BracketResult finite_part(std::span<const quad::RadialSample> samples,
                          const PairingConfig& cfg) {
  const quad::PoleFit fit = quad::adaptive_pole_fit(samples, cfg.fit);
  // A zero finite part with a zero pole leaves only the data itself as scale.
  double data_scale = 0.0;
  for (const auto& s : samples) data_scale = std::max(data_scale, std::abs(s.value));
  const double limit = cfg.rms_limit * (std::abs(fit.pole_coeff) + std::abs(fit.finite_part) +
                                        data_scale + 1e-300);
  if (fit.rms_residual > limit) {
    std::ostringstream os;
    os << "finite-part fit residual " << fit.rms_residual << " exceeds " << limit
       << " (radii ladder too coarse for the Laurent model)";
    throw FitQualityError(os.str(), fit.rms_residual, limit);
  }
  double err = fit.rms_residual;
  if (fit.basis_size > cfg.fit.min_terms) {
    const quad::PoleFit lower = quad::pole_fit(samples, fit.basis_size - 1);
    err = std::max(err, std::abs(fit.finite_part - lower.finite_part));
  }
  return {fit.finite_part, err, Method::FinitePart, fit};
}

void require_slope(const RadialFactor& g) {
  if (!g.slope_at_zero()) {
    throw InvalidParameter("factor " + g.name() +
                           " has no radial slope at 0+; its product with delta/|x| is not "
                           "defined by the finite-part rule");
  }
  if (!std::isfinite(g.value_at_zero()))
    throw InvalidParameter("factor " + g.name() + " is not finite at 0");
}

BracketResult pair_singular_order(const RadialFactor& g, const MeanEvaluator& means, int order,
                                  const PairingConfig& cfg) {
  require_slope(g);
  std::vector<quad::RadialSample> samples;
  samples.reserve(cfg.radii.size());
  for (double r : cfg.radii) samples.push_back({r, g.value(r) * means.probe(r, order) / r});
  return finite_part(samples, cfg);
}

BracketResult pair_order(const Distribution& t, const MeanEvaluator& means, int order,
                         const PairingConfig& cfg) {
  if (order > 1) throw InvalidParameter("pair: nested weak Laplacians are not supported");
  return std::visit(
      [&](const auto& n) -> BracketResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DeltaAtOrigin>) {
          return {n.coeff * means.probe_at_origin(order), 0.0, Method::PointEval, std::nullopt};
        } else if constexpr (std::is_same_v<T, RadialKernel>) {
          const quad::RadialGrid grid(means.reach_max(), cfg.panels, cfg.nodes_per_panel,
                                      means.reach_min());
          const auto q = quad::integrate_radial(
              [&](double r) { return n.profile(r) * means.probe(r, order); }, grid);
          return scaled({q.value, q.error_estimate, Method::Quadrature, std::nullopt}, n.coeff);
        } else if constexpr (std::is_same_v<T, SingularDeltaOverR>) {
          return scaled(pair_singular_order(n.factor, means, order, cfg), n.coeff);
        } else if constexpr (std::is_same_v<T, WeakLaplacianOf>) {
          BracketResult r = pair_order(*n.inner, means, order + 1, cfg);
          if (r.method == Method::Quadrature || r.method == Method::PointEval)
            r.method = Method::WeakLaplacian;
          return r;
        } else {
          BracketResult acc{0.0, 0.0, Method::PointEval, std::nullopt};
          for (const auto& term : n.terms) {
            const BracketResult r = pair_order(term, means, order, cfg);
            acc.value += r.value;
            acc.error_estimate += r.error_estimate;
            if (method_rank(r.method) > method_rank(acc.method)) acc.method = r.method;
            if (r.fit && !acc.fit) acc.fit = r.fit;
          }
          return acc;
        }
      },
      t.node());
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::PointEval: return "point-eval";
    case Method::Quadrature: return "quadrature";
    case Method::FinitePart: return "finite-part";
    case Method::WeakLaplacian: return "weak-laplacian";
  }
  return "?";
}

Distribution Distribution::delta(double coeff) { return Distribution(DeltaAtOrigin{coeff}); }

Distribution Distribution::kernel(std::string name, std::function<double(double)> profile,
                                  double coeff) {
  if (!profile) throw InvalidParameter("kernel: missing profile");
  check_kernel_integrable(name, profile);
  return Distribution(RadialKernel{coeff, std::move(name), std::move(profile)});
}

Distribution Distribution::singular(RadialFactor g, double coeff) {
  return Distribution(SingularDeltaOverR{coeff, std::move(g)});
}

Distribution Distribution::laplacian(const Distribution& inner) {
  return Distribution(WeakLaplacianOf{std::make_shared<const Distribution>(inner)});
}

Distribution Distribution::sum(std::vector<Distribution> terms) {
  Sum flat;
  for (auto& t : terms) {
    if (const auto* s = std::get_if<Sum>(&t.node_)) {
      flat.terms.insert(flat.terms.end(), s->terms.begin(), s->terms.end());
    } else {
      flat.terms.push_back(std::move(t));
    }
  }
  return Distribution(std::move(flat));
}

Distribution operator+(const Distribution& a, const Distribution& b) {
  return Distribution::sum({a, b});
}

Distribution operator*(double s, const Distribution& d) {
  return std::visit(
      [s](const auto& n) -> Distribution {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, WeakLaplacianOf>) {
          return Distribution::laplacian(s * *n.inner);
        } else if constexpr (std::is_same_v<T, Sum>) {
          std::vector<Distribution> terms;
          terms.reserve(n.terms.size());
          for (const auto& t : n.terms) terms.push_back(s * t);
          return Distribution::sum(std::move(terms));
        } else {
          T copy = n;
          copy.coeff *= s;
          return Distribution(std::move(copy));
        }
      },
      d.node_);
}

BracketResult pair(const Distribution& t, const testfn::TestFunction& phi,
                   const PairingConfig& cfg) {
  const MeanEvaluator means(phi, cfg);
  return pair_order(t, means, 0, cfg);
}

std::vector<quad::RadialSample> singular_samples(const RadialFactor& g,
                                                 const testfn::TestFunction& phi,
                                                 const PairingConfig& cfg) {
  const MeanEvaluator means(phi, cfg);
  std::vector<quad::RadialSample> samples;
  for (double r : cfg.radii) samples.push_back({r, g.value(r) * means.probe(r, 0) / r});
  return samples;
}

BracketResult pair_singular(const RadialFactor& g, const testfn::TestFunction& phi,
                            const PairingConfig& cfg) {
  const MeanEvaluator means(phi, cfg);
  return pair_singular_order(g, means, 0, cfg);
}

namespace {

/// Finite part of r -> scale * sphere_average(lap(h phi), r) with h given by its jet.
BracketResult laplacian_means(const std::function<Jet(double)>& h, const testfn::TestFunction& phi,
                              double scale, const PairingConfig& cfg) {
  const MeanEvaluator means(phi, cfg);
  std::vector<quad::RadialSample> samples;
  samples.reserve(cfg.radii.size());
  for (double r : cfg.radii) {
    // lap(h phi) = phi lap(h) + 2 h' d_r(phi) + h lap(phi)
    const Jet hj = h(r);
    const SphericalMeans m = means.at(r);
    const double lap = m.value * (hj.d2 + 2.0 * hj.d1 / r) + 2.0 * hj.d1 * m.radial_derivative +
                       hj.value * m.laplacian;
    samples.push_back({r, scale * lap});
  }
  return finite_part(samples, cfg);
}

}  // namespace

BracketResult pair_singular_laplacian_route(const RadialFactor& g,
                                            const testfn::TestFunction& phi,
                                            const PairingConfig& cfg) {
  require_slope(g);
  // delta/|x| = (1/6)|x| lap(delta), so h = r g.
  const auto h = [&g](double r) {
    const Jet gj = g.jet(r);
    return Jet{r * gj.value, gj.value + r * gj.d1, 2.0 * gj.d1 + r * gj.d2};
  };
  return laplacian_means(h, phi, 1.0 / 6.0, cfg);
}

BracketResult pair_laplacian_delta(const RadialFactor& f, const testfn::TestFunction& phi,
                                   const PairingConfig& cfg) {
  require_slope(f);
  return laplacian_means([&f](double r) { return f.jet(r); }, phi, 1.0, cfg);
}

double scaling_identity_check(int d, const testfn::TestFunction& phi) {
  if (d < 1) throw InvalidParameter("scaling_identity_check: dimension must be >= 1");
  const auto j = phi.radial(0.0);
  if (j.value == 0.0) throw InvalidParameter("scaling_identity_check: phi vanishes at its center");
  // lap_d(rho^2 P) = 2d P + (d + 3) rho P' + rho^2 P'', evaluated at rho = 0.
  const double rho = 0.0;
  const double lap = 2.0 * d * j.value + (d + 3.0) * rho * j.d1 + rho * rho * j.d2;
  return lap / (2.0 * d) / j.value;
}

BracketResult smooth_factor_triviality(const RadialFactor& f, const testfn::TestFunction& phi,
                                       const PairingConfig& cfg) {
  const auto slope = f.slope_at_zero();
  if (!slope || *slope != 0.0)
    throw InvalidParameter("smooth_factor_triviality: factor " + f.name() +
                           " is not smooth at 0 (nonzero radial slope)");
  return pair_singular(f, phi, cfg);
}

}  // namespace cspec::dist
