#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cspec/error.hpp"
#include "cspec/spectral.hpp"

using namespace cspec;
using spectral::PhysParams;
using std::numbers::pi;

namespace {

std::vector<testfn::TestFunction> bumps() {
  return {testfn::bump_new({0, 0, 0}, 1.0), testfn::bump_new({0, 0, 0}, 1.5),
          testfn::bump_new({0.1, -0.2, 0.15}, 1.3)};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(PhysParams(0, 1, 1), InvalidParameter);
  CHECK_THROWS_AS(PhysParams(1, -1, 1), InvalidParameter);
  CHECK_THROWS_AS(PhysParams(1, 1, 0), InvalidParameter);
  CHECK_NOTHROW(PhysParams(1, 1, -1));
}

TEST_CASE("closed-form spectrum examples") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = spectral::c_spectrum(PhysParams(1, 1, -1));
  const double us =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  CHECK(us < 1000.0);
  CHECK(rel(r.b, 2 * pi) <= 1e-15);
  CHECK(rel(r.energy, -2 * pi * pi) <= 1e-12);
  CHECK(r.sign_consistent);
  CHECK(!r.aghh_energy);

  const auto flipped = spectral::c_spectrum(PhysParams(1, 1, 1));
  CHECK(flipped.energy == r.energy);
  CHECK(!flipped.sign_consistent);
  CHECK(flipped.b < 0);

  const auto aghh = spectral::c_spectrum(PhysParams(std::sqrt(2.0), 1, -1));
  CHECK(rel(aghh.energy, -16 * pi * pi) <= 1e-12);
  REQUIRE(aghh.aghh_energy);
  CHECK(rel(*aghh.aghh_energy, -16 * pi * pi) <= 1e-12);
}

TEST_CASE("closed-form consistency on random parameters") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> pos(0.2, 3.0), a(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    double alpha = a(rng);
    if (std::abs(alpha) < 1e-3) alpha = 1.0;
    const PhysParams p(pos(rng), pos(rng), alpha);
    const auto r = spectral::c_spectrum(p);
    CHECK(r.energy < 0);
    CHECK(rel(r.energy, -p.hbar() * p.hbar() * r.b * r.b / (2 * p.mass())) <= 1e-14);
    CHECK(rel(r.energy, p.energy_of(r.b)) <= 1e-15);
    CHECK(r.sign_consistent == (r.b > 0));
    CHECK(spectral::c_spectrum(PhysParams(p.hbar(), p.mass(), -alpha)).energy == r.energy);
    CHECK(rel(p.decay_rate(r.energy), std::abs(r.b)) <= 1e-14);
  }
}

TEST_CASE("AGHH correspondence at hbar^2/m = 2") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> a(-10.0, 10.0), m(0.3, 3.0);
  for (int i = 0; i < 10; ++i) {
    const double mass = m(rng);
    const double alpha = a(rng);
    const auto r = spectral::c_spectrum(PhysParams(std::sqrt(2 * mass), mass, alpha));
    CHECK(rel(r.energy, -16 * pi * pi / (alpha * alpha)) <= 1e-12);
    CHECK(r.aghh_energy);
  }
}

TEST_CASE("Green's function") {
  const PhysParams p(1, 1, -1);
  CHECK(spectral::green_prefactor(p) == doctest::Approx(1 / (2 * pi)).epsilon(1e-15));
  CHECK(p.decay_rate(-0.5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(spectral::green_function(p, 1.0), InvalidParameter);
  CHECK_THROWS_AS(spectral::green_function(p, 0.0), InvalidParameter);
  for (const PhysParams& q : {p, PhysParams(0.8, 1.7, 2.0)})
    for (double e : {-0.5, -1.0, -2.0})
      for (const auto& phi : bumps()) CHECK(spectral::green_residual(q, e, phi) <= 1e-6);
}

TEST_CASE("the m/(pi hbar^2) prefactor fails the weak residual") {
  const PhysParams p(1, 1, -1);
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const double e = -0.5;
  const auto doubled = 2.0 * spectral::green_function(p, e);
  const double b = p.decay_rate(e);
  const double lhs = -0.5 * dist::pair(dist::Distribution::laplacian(doubled), phi).value +
                     std::abs(e) * dist::pair(doubled, phi).value;
  CHECK(b == doctest::Approx(1.0));
  CHECK(std::abs(lhs - phi.value({0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bound state normalization") {
  for (double b : {0.5, 1.0, 2.0, 7.5}) CHECK(std::abs(spectral::bound_state_norm_squared(b) - 1) <= 1e-8);
  CHECK_THROWS_AS(spectral::bound_state(0.0), InvalidParameter);
  CHECK_THROWS_AS(spectral::bound_state(-1.0), InvalidParameter);
}

TEST_CASE("C-spectrum residual vanishes only at b*") {
  const PhysParams p(1, 1, -1);
  const double bstar = spectral::c_spectrum(p).b;
  for (const auto& phi : bumps()) {
    const double p0 = phi.value({0, 0, 0});
    const auto at = spectral::c_spectrum_residual(p, phi);
    CHECK(at.b == doctest::Approx(bstar));
    CHECK(std::abs(at.residual) <= 1e-4 * std::abs(p0));
    const auto lo = spectral::c_spectrum_residual(p, phi, 0.9 * bstar);
    const auto hi = spectral::c_spectrum_residual(p, phi, 1.1 * bstar);
    CHECK(lo.residual * hi.residual < 0);
    const double predicted = std::sqrt(1.1 * bstar / (2 * pi)) * p0 * (p.alpha() * 0.1 * bstar);
    CHECK(hi.residual == doctest::Approx(predicted).epsilon(1e-4));
  }
}

TEST_CASE("residual is linear in phi") {
  const PhysParams p(1, 1, -1);
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const double b = 1.05 * spectral::c_spectrum(p).b;
  const double one = spectral::c_spectrum_residual(p, phi, b).residual;
  const double two = spectral::c_spectrum_residual(p, phi.scaled(2.0), b).residual;
  CHECK(two == doctest::Approx(2 * one).epsilon(1e-9));
}

TEST_CASE("Hellmann-Feynman triple") {
  for (double b : {1.0, 2.0}) {
    for (double db : {1e-2, 1e-3}) {
      const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
      const auto hf = spectral::hellmann_feynman_check(b, phi, db);
      const double tol = std::max(1e-6, db * db);
      CHECK(hf.tolerance == doctest::Approx(tol));
      CHECK(std::abs(hf.analytic + 1) <= tol);
      CHECK(std::abs(hf.symbolic + 1) <= tol);
      CHECK(std::abs(hf.finite_diff + 1) <= tol);
    }
  }
  const auto away = testfn::bump_new({2, 0, 0}, 1.0);
  const auto z = spectral::hellmann_feynman_check(1.0, away, 1e-3);
  CHECK(z.analytic == 0.0);
  CHECK(z.symbolic == 0.0);
  CHECK(std::abs(z.finite_diff) <= 1e-8);
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK_THROWS_AS(spectral::hellmann_feynman_check(1.0, phi, 0.0), InvalidParameter);
  CHECK_THROWS_AS(spectral::hellmann_feynman_check(1.0, phi, 0.1), InvalidParameter);
}

TEST_CASE("cutoff scan diverges linearly") {
  const PhysParams p(1, 1, -1);
  CHECK(spectral::cutoff_slope(p) == doctest::Approx(2 / pi));
  const auto scan = spectral::cutoff_scan(p, -1.0, {1e2, 1e3, 1e4});
  REQUIRE(scan.size() == 3);
  CHECK(std::abs(scan.back().ratio() / (2 / pi) - 1) <= 0.01);
  // closed form: (2/pi) [L - atan(sqrt(2) pi L) / (sqrt(2) pi)]
  for (const auto& pt : scan) {
    const double c = std::sqrt(2.0) * pi;
    CHECK(pt.integral == doctest::Approx(2 / pi * (pt.cutoff - std::atan(c * pt.cutoff) / c)).epsilon(1e-10));
  }
  const auto pair = spectral::cutoff_scan(p, -1.0, {1e3, 2e3});
  CHECK(std::abs((pair[1].integral - pair[0].integral) / (2 / pi * 1e3) - 1) <= 0.02);
  const auto deep = spectral::cutoff_scan(p, -1e6, {1e2, 1e3, 1e4});
  CHECK(deep[0].integral < scan[0].integral);
  CHECK(deep[2].ratio() > deep[0].ratio());
  CHECK_THROWS_AS(spectral::cutoff_scan(p, 1.0, {1e2}), InvalidParameter);
  CHECK_THROWS_AS(spectral::cutoff_scan(p, -1.0, {1e3, 1e2}), InvalidParameter);
  CHECK_THROWS_AS(spectral::cutoff_scan(p, -1.0, {-1.0}), InvalidParameter);
}
