#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <future>
#include <numbers>
#include <vector>

#include "cspec/dist.hpp"
#include "cspec/error.hpp"
#include "cspec/quad.hpp"
#include "cspec/testfn.hpp"

using namespace cspec;
using dist::Distribution;
using dist::RadialFactor;
using std::numbers::pi;

namespace {

std::vector<testfn::TestFunction> bumps() {
  return {testfn::bump_new({0, 0, 0}, 1.0), testfn::bump_new({0, 0, 0}, 1.5),
          testfn::bump_new({0.1, -0.2, 0.15}, 1.3)};
}

double phi0(const testfn::TestFunction& phi) { return phi.value({0, 0, 0}); }

std::vector<RadialFactor> admissible() {
  return {RadialFactor::constant(1.0), RadialFactor::exponential(0.5),
          RadialFactor::exponential(1.0), RadialFactor::exponential(2.0),
          RadialFactor::abs_power(1), RadialFactor::polynomial({1.0, 0.0, 1.0})};
}

Distribution yukawa(double b) {
  return Distribution::kernel("exp(-b r)/r", [b](double r) { return std::exp(-b * r) / r; });
}

}  // namespace

TEST_CASE("point evaluation is exact") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto r = dist::pair(Distribution::delta(), phi);
  CHECK(r.value == 1.0);
  CHECK(r.error_estimate == 0.0);
  CHECK(r.method == dist::Method::PointEval);
  const auto z = dist::pair(Distribution::delta(2.0) + Distribution::delta(-2.0), phi);
  CHECK(z.value == 0.0);
}

TEST_CASE("regular kernel matches adaptive 1D integration of the profile") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto r = dist::pair(yukawa(1.0), phi);
  CHECK(r.method == dist::Method::Quadrature);
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double oracle = GK::integrate(
      [&](double x) { return std::exp(-x) / x * phi.radial(x).value * 4 * pi * x * x; }, 0.0, 1.0,
      15, 1e-14);
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(r.error_estimate >= 0.0);
}

TEST_CASE("off-center kernel pairing matches Cartesian spherical averaging") {
  const auto phi = testfn::bump_new({0.1, -0.2, 0.15}, 1.3);
  const auto r = dist::pair(yukawa(2.0), phi);
  const quad::SphereRule rule(32, 32);
  const double reach = norm(phi.center()) + phi.support_radius();
  const auto ref = quad::integrate_radial(
      [&](double x) { return std::exp(-2 * x) / x * quad::sphere_average([&](const Vec3& y) { return phi.value(y); }, x, rule); },
      quad::RadialGrid(reach, 128, 16));
  CHECK(r.value == doctest::Approx(ref.value).epsilon(1e-9));
}

TEST_CASE("non-integrable kernels are rejected at construction") {
  CHECK_THROWS_AS(Distribution::kernel("1/r^4", [](double r) { return 1 / (r * r * r * r); }),
                  NumericalDomainError);
  CHECK_NOTHROW(Distribution::kernel("1/r^2", [](double r) { return 1 / (r * r); }));
}

TEST_CASE("pairing is linear in the distribution") {
  const auto phi = testfn::bump_new({0.1, -0.2, 0.15}, 1.3);
  const auto t1 = yukawa(1.0);
  const auto t2 = Distribution::singular(RadialFactor::abs_power(1));
  const double a = 2.5, b = -0.75;
  const double lhs = dist::pair(a * t1 + b * t2, phi).value;
  const double rhs = a * dist::pair(t1, phi).value + b * dist::pair(t2, phi).value;
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
}

TEST_CASE("pairing is linear in the test function") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto t = Distribution::singular(RadialFactor::exponential(1.0));
  CHECK(dist::pair(t, phi.scaled(3.0)).value ==
        doctest::Approx(3.0 * dist::pair(t, phi).value).epsilon(1e-10));
}

TEST_CASE("singular pairing worked cases") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK(std::abs(dist::pair_singular(RadialFactor::constant(1.0), phi).value) <= 1e-6);
  CHECK(dist::pair_singular(RadialFactor::exponential(1.0), phi).value ==
        doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(dist::pair_singular(RadialFactor::abs_power(1), phi).value ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(dist::pair_singular(RadialFactor::exponential(1.0), phi).method == dist::Method::FinitePart);
}

TEST_CASE("exponential factor gives -b phi(0)") {
  for (const auto& phi : bumps()) {
    for (double b : {0.5, 1.0, 2.0}) {
      const auto r = dist::pair_singular(RadialFactor::exponential(b), phi);
      CHECK(std::abs(r.value + b * phi0(phi)) <= 1e-4 * b * std::abs(phi0(phi)));
    }
  }
}

TEST_CASE("laplacian route worked cases and pole law") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto e = dist::pair_singular_laplacian_route(RadialFactor::exponential(1.0), phi);
  CHECK(e.value == doctest::Approx(-1.0).epsilon(1e-4));
  REQUIRE(e.fit);
  CHECK(e.fit->pole_coeff == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  const auto one = dist::pair_singular_laplacian_route(RadialFactor::constant(1.0), phi);
  CHECK(std::abs(one.value) <= 1e-6);
  CHECK(one.fit->pole_coeff == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  const auto abs = dist::pair_singular_laplacian_route(RadialFactor::abs_power(1), phi);
  CHECK(abs.value == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(std::abs(abs.fit->pole_coeff) <= 1e-6);
}

TEST_CASE("the two singular oracles agree and obey the pole law") {
  for (const auto& phi : bumps()) {
    for (const auto& g : admissible()) {
      const auto direct = dist::pair_singular(g, phi);
      const auto route = dist::pair_singular_laplacian_route(g, phi);
      CAPTURE(g.name());
      CHECK(std::abs(direct.value - route.value) <=
            direct.error_estimate + route.error_estimate);
      const double expected = g.value_at_zero() * phi0(phi);
      REQUIRE(direct.fit);
      REQUIRE(route.fit);
      CHECK(std::abs(direct.fit->pole_coeff - expected) <= 1e-3 * std::abs(expected) + 1e-9);
      CHECK(std::abs(route.fit->pole_coeff - expected / 3) <= 1e-3 * std::abs(expected) + 1e-9);
    }
  }
}

TEST_CASE("triviality trichotomy") {
  for (const auto& phi : bumps()) {
    const double p0 = std::abs(phi0(phi));
    CHECK(std::abs(dist::pair_singular(RadialFactor::constant(1.0), phi).value) <= 1e-6 * p0);
    CHECK(std::abs(dist::smooth_factor_triviality(RadialFactor::polynomial({1, 0, 1}), phi).value) <=
          1e-6 * p0);
    CHECK(std::abs(dist::smooth_factor_triviality(RadialFactor::cos_r_squared(), phi).value) <=
          1e-5 * p0);
    CHECK(std::abs(dist::pair_singular(RadialFactor::abs_power(1), phi).value - phi0(phi)) <= 1e-5);
  }
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK_THROWS_AS(dist::smooth_factor_triviality(RadialFactor::exponential(1.0), phi),
                  InvalidParameter);
}

TEST_CASE("zero factor pairs to zero") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK(std::abs(dist::pair_singular(RadialFactor::constant(0.0), phi).value) <= 1e-14);
}

TEST_CASE("factors without slope data are refused") {
  const RadialFactor wild("r sin(1/r)", [](double r) {
    if (r == 0.0) return dist::Jet{0.0, 0.0, 0.0};
    return dist::Jet{r * std::sin(1 / r), 0.0, 0.0};
  }, std::nullopt);
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK_THROWS_AS(dist::pair_singular(wild, phi), InvalidParameter);
}

TEST_CASE("sgn convention: radial derivative averages vanish at the origin") {
  const auto phi = testfn::bump_new({0.1, -0.2, 0.15}, 1.3);
  const quad::SphereRule rule(32, 32);
  std::vector<quad::RadialSample> s;
  for (double r : quad::default_radii_ladder())
    s.push_back({r, quad::sphere_average([&](const Vec3& x) { return dot(x, phi.gradient(x)) / norm(x); },
                                         r, rule)});
  const auto fit = quad::adaptive_pole_fit(s);
  CHECK(std::abs(fit.pole_coeff) <= 1e-8);
  CHECK(std::abs(fit.finite_part) <= 1e-8);
  CHECK(fit.slope == doctest::Approx(phi.laplacian({0, 0, 0}) / 3).epsilon(1e-6));
}

TEST_CASE("weak Yukawa-Laplacian identity") {
  for (const auto& phi : bumps()) {
    for (double b : {0.5, 1.0, 2.0}) {
      const auto lap = dist::pair(Distribution::laplacian(yukawa(b)), phi);
      CHECK(lap.method == dist::Method::WeakLaplacian);
      const double rest = dist::pair(yukawa(b), phi).value;
      CHECK(std::abs(lap.value + 4 * pi * phi0(phi) - b * b * rest) <= 1e-6 * (1 + std::abs(phi0(phi))));
    }
  }
}

TEST_CASE("laplacian of delta against a factor") {
  const auto phi = testfn::bump_new({0.1, -0.2, 0.15}, 1.3);
  // |x|^2/6 lap(delta) = delta
  const auto sq = dist::pair_laplacian_delta(RadialFactor::polynomial({0, 0, 1.0 / 6}), phi);
  CHECK(sq.value == doctest::Approx(phi0(phi)).epsilon(1e-8));
  // constant factor: lap(phi)(0)
  const auto one = dist::pair_laplacian_delta(RadialFactor::constant(1.0), phi);
  CHECK(one.value == doctest::Approx(phi.laplacian({0, 0, 0})).epsilon(1e-8));
  // (1/6)|x| lap(delta) = delta/|x|, whose pairing vanishes
  const auto abs = dist::pair_laplacian_delta(RadialFactor::polynomial({0, 1.0 / 6}), phi);
  CHECK(std::abs(abs.value) <= 1e-6);
}

TEST_CASE("scaling identity in every dimension") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  for (int d = 1; d <= 4; ++d) CHECK(std::abs(dist::scaling_identity_check(d, phi) - 1.0) <= 1e-12);
  CHECK_THROWS_AS(dist::scaling_identity_check(0, phi), InvalidParameter);
}

TEST_CASE("sums flatten and accumulate errors") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto a = Distribution::singular(RadialFactor::exponential(1.0));
  const auto s = Distribution::sum({a, Distribution::sum({Distribution::delta(), a})});
  const auto& node = std::get<dist::Sum>(s.node());
  CHECK(node.terms.size() == 3);
  const auto r = dist::pair(s, phi);
  const auto single = dist::pair(a, phi);
  CHECK(r.value == doctest::Approx(1.0 + 2 * single.value).epsilon(1e-12));
  CHECK(r.error_estimate >= 2 * single.error_estimate * (1 - 1e-12));
  CHECK(r.method == dist::Method::FinitePart);
}

TEST_CASE("concurrent pairings are deterministic") {
  const auto phi = testfn::bump_new({0.1, -0.2, 0.15}, 1.3);
  const auto t = Distribution::singular(RadialFactor::exponential(1.0)) + yukawa(1.0);
  const double ref = dist::pair(t, phi).value;
  std::vector<std::future<double>> jobs;
  for (int i = 0; i < 4; ++i)
    jobs.push_back(std::async(std::launch::async, [&] { return dist::pair(t, phi).value; }));
  for (auto& j : jobs) CHECK(j.get() == ref);
}
