#include <algorithm>
#include <cmath>
#include <numbers>

#include "cspec/cli.hpp"
#include "cspec/lloc.hpp"
#include "cspec/quad.hpp"
#include "cspec/rewrite/parser.hpp"
#include "cspec/rewrite/verify.hpp"
#include "cspec/spectral.hpp"
#include "cspec/testfn.hpp"

namespace cspec::cli {

namespace {

using dist::RadialFactor;
using std::numbers::pi;

class Suite {
public:
  explicit Suite(const SuiteOptions& o) : opts_(o) {}

  void add(std::string name, double measured, double tolerance, std::string detail = {}) {
    const double tol = opts_.tolerance.value_or(tolerance);
    checks_.push_back({std::move(name), std::isfinite(measured) && measured <= tol, measured, tol,
                       std::move(detail)});
  }

  /// Boolean property; reported as measured 0 (holds) or 1 (violated).
  void holds(std::string name, bool ok, std::string detail = {}) {
    checks_.push_back({std::move(name), ok, ok ? 0.0 : 1.0, 0.0, std::move(detail)});
  }

  /// Runs body, turning library exceptions into a failed check.
  template <typename F>
  void guarded(const std::string& name, F body) {
    try {
      body();
    } catch (const std::exception& e) {
      checks_.push_back({name, false, NAN, 0.0, e.what()});
    }
  }

  const dist::PairingConfig& cfg() const { return opts_.pairing; }
  std::vector<Check> take() { return std::move(checks_); }

private:
  const SuiteOptions& opts_;
  std::vector<Check> checks_;
};

std::vector<testfn::TestFunction> bumps() {
  return {testfn::bump_new({0.0, 0.0, 0.0}, 1.0), testfn::bump_new({0.0, 0.0, 0.0}, 1.5),
          testfn::bump_new({0.1, -0.2, 0.15}, 1.3)};
}

std::string label(const testfn::TestFunction& phi) {
  const Vec3 c = phi.center();
  return "bump(" + format_number(c[0]) + "," + format_number(c[1]) + "," + format_number(c[2]) +
         ";" + format_number(phi.support_radius()) + ")";
}

double phi0(const testfn::TestFunction& phi) { return phi.value({0.0, 0.0, 0.0}); }

void testfn_checks(Suite& s) {
  s.guarded("testfn.mollifier-mass", [&] {
    const testfn::Mollifier m(0.5);
    const quad::RadialGrid grid(0.5, 64, 16);
    const double mass =
        quad::integrate_radial_once([&m](double r) { return m.radial_value(r); }, grid);
    s.add("testfn.mollifier-mass", std::abs(mass - 1.0), 1e-8);
  });
  s.guarded("testfn.fd-laplacian", [&] {
    const auto phi = testfn::bump_new({0.0, 0.0, 0.0}, 1.0);
    const double h = 1e-3;
    const double fd = 6.0 * (phi.value({h, 0.0, 0.0}) - phi.value({0.0, 0.0, 0.0})) / (h * h);
    s.add("testfn.fd-laplacian", std::abs(fd - phi.laplacian({0.0, 0.0, 0.0})), 1e-5);
  });
}

void dist_checks(Suite& s) {
  const auto& cfg = s.cfg();
  for (const auto& phi : bumps()) {
    const std::string at = " " + label(phi);
    const double p0 = std::abs(phi0(phi));
    s.guarded("dist.delta-over-r-vanishes" + at, [&] {
      const auto r = dist::pair_singular(RadialFactor::constant(1.0), phi, cfg);
      s.add("dist.delta-over-r-vanishes" + at, std::abs(r.value), 1e-6 * p0, "<delta/|x|, phi> = 0");
    });
    s.guarded("dist.smooth-triviality" + at, [&] {
      const auto a = dist::smooth_factor_triviality(RadialFactor::polynomial({1.0, 0.0, 1.0}), phi, cfg);
      s.add("dist.smooth-triviality 1+|x|^2" + at, std::abs(a.value), 1e-6 * p0);
      const auto c = dist::smooth_factor_triviality(RadialFactor::cos_r_squared(), phi, cfg);
      s.add("dist.smooth-triviality cos(|x|^2)" + at, std::abs(c.value), 1e-5 * std::max(p0, 1e-300));
    });
    s.guarded("dist.non-triviality" + at, [&] {
      const auto r = dist::pair_singular(RadialFactor::abs_power(1), phi, cfg);
      s.add("dist.non-triviality" + at, std::abs(r.value - phi0(phi)), 1e-5,
            "<delta/|x| * |x|, phi> = phi(0)");
    });
    for (double b : {0.5, 1.0, 2.0}) {
      const std::string tag = " b=" + format_number(b) + at;
      s.guarded("dist.exp-factor" + tag, [&] {
        const auto g = RadialFactor::exponential(b);
        const auto direct = dist::pair_singular(g, phi, cfg);
        s.add("dist.exp-factor" + tag, std::abs(direct.value + b * phi0(phi)), 1e-4 * b * p0,
              "<delta/|x| e^{-b|x|}, phi> = -b phi(0)");
        const auto route = dist::pair_singular_laplacian_route(g, phi, cfg);
        s.add("dist.oracle-agreement" + tag, std::abs(direct.value - route.value),
              direct.error_estimate + route.error_estimate);
      });
      s.guarded("dist.yukawa-laplacian" + tag, [&] {
        const auto k = dist::Distribution::kernel(
            "yukawa", [b](double r) { return std::exp(-b * r) / r; });
        const double lhs = dist::pair(dist::Distribution::laplacian(k), phi, cfg).value;
        const double rhs = -4.0 * pi * phi0(phi) + b * b * dist::pair(k, phi, cfg).value;
        s.add("dist.yukawa-laplacian" + tag, std::abs(lhs - rhs), 1e-6 * (1.0 + p0));
      });
    }
  }
  s.guarded("dist.scaling-identity", [&] {
    const auto phi = testfn::bump_new({0.0, 0.0, 0.0}, 1.0);
    for (int d = 1; d <= 4; ++d)
      s.add("dist.scaling-identity d=" + std::to_string(d),
            std::abs(dist::scaling_identity_check(d, phi) - 1.0), 1e-12);
  });
}

void spectral_checks(Suite& s) {
  const auto& cfg = s.cfg();
  s.guarded("spectral.energy", [&] {
    const auto r = spectral::c_spectrum(spectral::PhysParams(1.0, 1.0, -1.0));
    const double exact = -2.0 * pi * pi;
    s.add("spectral.energy", std::abs(r.energy - exact) / std::abs(exact), 1e-12);
  });
  s.guarded("spectral.aghh", [&] {
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const double alpha = (k % 2 ? -1.0 : 1.0) * 0.37 * k;
      const auto r = spectral::c_spectrum(spectral::PhysParams(std::sqrt(2.0), 1.0, alpha));
      const double ref = -16.0 * pi * pi / (alpha * alpha);
      worst = std::max(worst, std::abs(r.energy - ref) / std::abs(ref));
    }
    s.add("spectral.aghh", worst, 1e-12, "E = -16 pi^2 / alpha^2 at hbar^2/m = 2");
  });
  const spectral::PhysParams unit(1.0, 1.0, -1.0);
  for (const auto& phi : bumps()) {
    for (double e : {-0.5, -1.0, -2.0}) {
      const std::string name = "spectral.green E=" + format_number(e) + " " + label(phi);
      s.guarded(name, [&] { s.add(name, spectral::green_residual(unit, e, phi, cfg), 1e-6); });
    }
  }
  for (double b : {0.5, 1.0, 2.0}) {
    const std::string name = "spectral.normalization b=" + format_number(b);
    s.guarded(name, [&] { s.add(name, std::abs(spectral::bound_state_norm_squared(b) - 1.0), 1e-8); });
  }
  for (const auto& phi : bumps()) {
    const std::string name = "spectral.c-spectrum-residual " + label(phi);
    s.guarded(name, [&] {
      const auto r = spectral::c_spectrum_residual(unit, phi, std::nullopt, cfg);
      s.add(name, std::abs(r.residual), 1e-4 * std::abs(phi0(phi)));
      const double bs = r.b;
      const double lo = spectral::c_spectrum_residual(unit, phi, 0.9 * bs, cfg).residual;
      const double hi = spectral::c_spectrum_residual(unit, phi, 1.1 * bs, cfg).residual;
      s.holds("spectral.c-spectrum-sign-change " + label(phi), lo * hi < 0.0,
              "residual(0.9 b*) = " + format_number(lo) + ", residual(1.1 b*) = " + format_number(hi));
    });
  }
  const auto origin = testfn::bump_new({0.0, 0.0, 0.0}, 1.0);
  for (double b : {1.0, 2.0}) {
    for (double db : {1e-2, 1e-3}) {
      const std::string name =
          "spectral.hellmann-feynman b=" + format_number(b) + " db=" + format_number(db);
      s.guarded(name, [&] {
        const auto hf = spectral::hellmann_feynman_check(b, origin, db, cfg);
        const double target = -phi0(origin);
        const double dev = std::max({std::abs(hf.analytic - target), std::abs(hf.symbolic - target),
                                     std::abs(hf.finite_diff - target)});
        s.add(name, dev, hf.tolerance);
      });
    }
  }
  s.guarded("spectral.cutoff", [&] {
    const auto scan = spectral::cutoff_scan(unit, -1.0, {1e2, 1e3, 2e3, 1e4});
    const double slope = spectral::cutoff_slope(unit);
    s.add("spectral.cutoff-ratio L=1e4", std::abs(scan[3].ratio() - slope) / slope, 1e-2,
          "I(L)/L -> 2m/(pi hbar^2)");
    s.add("spectral.cutoff-increment L=1e3",
          std::abs((scan[2].integral - scan[1].integral) - slope * 1e3) / (slope * 1e3), 2e-2);
  });
}

void lloc_checks(Suite& s) {
  for (const auto& k : lloc::corpus()) {
    const std::string name = "lloc.bse " + k.id;
    s.guarded(name, [&] {
      const auto rep = lloc::verify_bse(k, 1.0, 0.2);
      s.holds("lloc.bse-equivalence " + k.id, rep.equivalent,
              std::string("balls: ") + lloc::to_string(rep.ball_verdict) +
                  ", plateaus: " + lloc::to_string(rep.plateau_verdict));
      if (rep.verdict == lloc::Verdict::LocallyL2)
        s.holds("lloc.sandwich " + k.id, rep.plateau.sandwich_holds);
    });
  }
  s.guarded("lloc.psi", [&] {
    const lloc::Kernel psi{"psi_1", [](double r) { return std::exp(-r) / (r * std::sqrt(2.0 * pi)); }};
    const auto n = lloc::local_l2_norm(psi, 1.0);
    s.holds("lloc.psi-locally-L2", !n.divergent());
  });
}

void rewrite_checks(Suite& s) {
  const auto& cfg = s.cfg();
  const rewrite::Bindings bind = {{"b", 1.3}, {"hbar", 1.0}, {"m", 1.0}, {"alpha", -1.0},
                                  {"E", -0.845}};
  s.guarded("rewrite.hpsi-structural", [&] {
    const auto form = rewrite::reduce(rewrite::parse(rewrite::hpsi_expression())).form;
    const auto expected = rewrite::parse("sqrt(b/(2*pi))*(4*pi*hbar^2/(2*m) + alpha*b)");
    s.holds("rewrite.hpsi-structural",
            form.complete() && expected->kind == rewrite::Kind::Scalar &&
                form.delta_coeff == expected->coeff,
            "delta coefficient " + form.delta_coeff.to_string());
  });
  const auto phi = testfn::bump_new({0.0, 0.0, 0.0}, 1.0);
  for (const auto& text : rewrite::regression_corpus()) {
    const std::string name = "rewrite.soundness " + text;
    s.guarded(name, [&] {
      const auto e = rewrite::parse(text);
      const auto v = rewrite::verify_reduction(e, phi, bind, cfg);
      s.add(name, v.gap, v.tolerance, "canonical " + v.form.to_string());
      if (rewrite::node_count(e) <= 8) {
        const auto forms = rewrite::reachable_normal_forms(e);
        s.holds("rewrite.confluence " + text, forms.size() == 1,
                std::to_string(forms.size()) + " normal form(s)");
      }
    });
  }
}

}  // namespace

std::vector<Check> run_verify_suite(const SuiteOptions& opts) {
  Suite s(opts);
  testfn_checks(s);
  dist_checks(s);
  spectral_checks(s);
  lloc_checks(s);
  rewrite_checks(s);
  return s.take();
}

}  // namespace cspec::cli
