#include "cspec/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cspec/error.hpp"
#include "cspec/quad.hpp"
#include "cspec/rewrite/parser.hpp"
#include "cspec/rewrite/verify.hpp"

namespace cspec::spectral {

using dist::Distribution;
using dist::RadialFactor;
using std::numbers::pi;

namespace {

Distribution yukawa(double b, double coeff, const std::string& name) {
  return Distribution::kernel(
      name, [b](double r) { return std::exp(-b * r) / r; }, coeff);
}

double kinetic_prefactor(const PhysParams& p) {
  return p.hbar() * p.hbar() / (2.0 * p.mass());
}

}  // namespace

PhysParams::PhysParams(double hbar, double mass, double alpha)
    : hbar_(hbar), mass_(mass), alpha_(alpha) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidParameter("hbar must be positive");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidParameter("mass must be positive");
  if (alpha == 0.0 || !std::isfinite(alpha)) throw InvalidParameter("alpha must be nonzero");
}

double PhysParams::decay_rate(double energy) const {
  return std::sqrt(2.0 * mass_ * std::abs(energy)) / hbar_;
}

double PhysParams::energy_of(double b) const { return -hbar_ * hbar_ * b * b / (2.0 * mass_); }

double green_prefactor(const PhysParams& p) {
  return p.mass() / (2.0 * pi * p.hbar() * p.hbar());
}

Distribution green_function(const PhysParams& p, double energy) {
  if (!(energy < 0.0)) throw InvalidParameter("green_function: energy must be negative");
  const double b = p.decay_rate(energy);
  std::ostringstream os;
  os << green_prefactor(p) << "*exp(-" << b << "*|x|)/|x|";
  return yukawa(b, green_prefactor(p), os.str());
}

double green_residual(const PhysParams& p, double energy, const testfn::TestFunction& phi,
                      const dist::PairingConfig& cfg) {
  const Distribution g = green_function(p, energy);
  const Distribution applied = Distribution::sum(
      {-kinetic_prefactor(p) * Distribution::laplacian(g), std::abs(energy) * g});
  return std::abs(dist::pair(applied, phi, cfg).value - phi.value({0.0, 0.0, 0.0}));
}

Distribution bound_state(double b) {
  if (!(b > 0.0)) throw InvalidParameter("bound_state: b must be positive");
  return yukawa(b, std::sqrt(b / (2.0 * pi)), "psi_b");
}

double bound_state_norm_squared(double b) {
  if (!(b > 0.0)) throw InvalidParameter("bound_state: b must be positive");
  const double c = b / (2.0 * pi);
  const quad::RadialGrid grid(40.0 / b, 64, 16);
  return quad::integrate_radial(
             [b, c](double r) { return c * std::exp(-2.0 * b * r) / (r * r); }, grid)
      .value;
}

SpectralResult c_spectrum(const PhysParams& p) {
  const double h2 = p.hbar() * p.hbar();
  SpectralResult s;
  s.b = -2.0 * pi * h2 / (p.mass() * p.alpha());
  s.energy = -2.0 * pi * pi * h2 * h2 * h2 /
             (p.mass() * p.mass() * p.mass() * p.alpha() * p.alpha());
  s.sign_consistent = s.b > 0.0;
  if (std::abs(h2 / p.mass() - 2.0) <= 2e-9) s.aghh_energy = -16.0 * pi * pi / (p.alpha() * p.alpha());
  return s;
}

ResidualBreakdown c_spectrum_residual(const PhysParams& p, const testfn::TestFunction& phi,
                                      std::optional<double> b, const dist::PairingConfig& cfg) {
  ResidualBreakdown r;
  r.b = b ? *b : std::abs(c_spectrum(p).b);
  r.energy = p.energy_of(r.b);
  const Distribution psi = bound_state(r.b);
  const double amp = std::sqrt(r.b / (2.0 * pi));

  const auto kin = dist::pair(Distribution::laplacian(psi), phi, cfg);
  const auto pot = dist::pair_singular(RadialFactor::exponential(r.b), phi, cfg);
  const auto en = dist::pair(psi, phi, cfg);

  r.kinetic = -kinetic_prefactor(p) * kin.value;
  r.potential = -p.alpha() * amp * pot.value;
  r.energy_term = r.energy * en.value;
  r.residual = r.kinetic + r.potential - r.energy_term;
  r.error_estimate = kinetic_prefactor(p) * kin.error_estimate +
                     std::abs(p.alpha()) * amp * pot.error_estimate +
                     std::abs(r.energy) * en.error_estimate;
  return r;
}

HellmannFeynman hellmann_feynman_check(double b, const testfn::TestFunction& phi, double db,
                                       const dist::PairingConfig& cfg) {
  if (!(db > 0.0 && db < 0.1)) throw InvalidParameter("hellmann_feynman_check: db must lie in (0, 0.1)");
  const double phi0 = phi.value({0.0, 0.0, 0.0});
  HellmannFeynman hf;
  hf.analytic = -std::exp(-b * 0.0) * phi0;

  const auto form = rewrite::reduce(rewrite::parse("d/db(delta/|x|*exp(-b*|x|))")).form;
  hf.symbolic = rewrite::canonical_bracket(form, phi, {{"b", b}}, cfg).value;

  const double up = dist::pair_singular(RadialFactor::exponential(b + db), phi, cfg).value;
  const double down = dist::pair_singular(RadialFactor::exponential(b - db), phi, cfg).value;
  hf.finite_diff = (up - down) / (2.0 * db);
  hf.tolerance = std::max(1e-6, db * db) * std::abs(phi0);
  return hf;
}

std::vector<CutoffPoint> cutoff_scan(const PhysParams& p, double energy,
                                     const std::vector<double>& cutoffs) {
  if (!(energy < 0.0)) throw InvalidParameter("cutoff_scan: energy must be negative");
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > 0.0) || !std::isfinite(cutoffs[i]))
      throw InvalidParameter("cutoff_scan: cutoffs must be positive");
    if (i > 0 && !(cutoffs[i] > cutoffs[i - 1]))
      throw InvalidParameter("cutoff_scan: cutoffs must be strictly ascending");
  }
  // Under the e^{-2 pi i k.x} convention lap -> -4 pi^2 |k|^2.
  const double a = kinetic_prefactor(p) * 4.0 * pi * pi;
  const double c = std::abs(energy);
  const auto f = [a, c](double k) { return 4.0 * pi * k * k / (a * k * k + c); };
  std::vector<CutoffPoint> out;
  out.reserve(cutoffs.size());
  for (double lam : cutoffs)
    out.push_back({lam, quad::integrate_graded(f, lam, std::sqrt(c / a)).value});
  return out;
}

double cutoff_slope(const PhysParams& p) { return 2.0 * p.mass() / (pi * p.hbar() * p.hbar()); }

}  // namespace cspec::spectral
