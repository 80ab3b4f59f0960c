#pragma once

// Physics layer for H psi = -(hbar^2 / 2m) lap(psi) - alpha delta(x) psi on R^3.

#include <optional>
#include <vector>

#include "cspec/dist.hpp"
#include "cspec/testfn.hpp"

namespace cspec::spectral {

class PhysParams {
public:
  /// Throws InvalidParameter unless hbar > 0, mass > 0 and alpha != 0.
  PhysParams(double hbar, double mass, double alpha);

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double alpha() const noexcept { return alpha_; }

  /// Inverse decay length sqrt(2 m |E|) / hbar of a bound state at energy E.
  double decay_rate(double energy) const;
  /// -hbar^2 b^2 / (2 m)
  double energy_of(double b) const;

private:
  double hbar_, mass_, alpha_;
};

struct SpectralResult {
  double b = 0.0;
  double energy = 0.0;
  /// Whether the solution of the vanishing condition has b > 0.
  bool sign_consistent = false;
  /// -16 pi^2 / alpha^2, reported when hbar^2 / m = 2.
  std::optional<double> aghh_energy;
};

/// (m / (2 pi hbar^2)) e^{-b r} / r with b = sqrt(2 m |E|) / hbar, the kernel
/// solving (-(hbar^2/2m) lap + |E|) G = delta. Throws InvalidParameter for E >= 0.
dist::Distribution green_function(const PhysParams& p, double energy);

/// Coefficient of e^{-b r}/r in green_function.
double green_prefactor(const PhysParams& p);

/// |<G, -(hbar^2/2m) lap(phi) + |E| phi> - phi(0)|
double green_residual(const PhysParams& p, double energy, const testfn::TestFunction& phi,
                      const dist::PairingConfig& cfg = {});

/// sqrt(b / 2pi) e^{-b r} / r, unit L^2 norm. Throws InvalidParameter for b <= 0.
dist::Distribution bound_state(double b);

/// L^2 norm squared of bound_state(b) by radial quadrature.
double bound_state_norm_squared(double b);

/// Closed-form C-spectrum: b solves 4 pi hbar^2 / (2m) + alpha b = 0 and
/// E = -2 pi^2 hbar^6 / (m^3 alpha^2).
SpectralResult c_spectrum(const PhysParams& p);

struct ResidualBreakdown {
  double b = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;     // <-(hbar^2/2m) lap(psi), phi>
  double potential = 0.0;   // <-alpha delta psi, phi>
  double energy_term = 0.0; // E <psi, phi>
  double residual = 0.0;    // kinetic + potential - energy_term
  double error_estimate = 0.0;
};

/// <H psi_b, phi> - E_b <psi_b, phi> evaluated through the numerical oracles.
/// b defaults to |b_*| from c_spectrum; E_b = -hbar^2 b^2 / (2m).
ResidualBreakdown c_spectrum_residual(const PhysParams& p, const testfn::TestFunction& phi,
                                      std::optional<double> b = std::nullopt,
                                      const dist::PairingConfig& cfg = {});

struct HellmannFeynman {
  double analytic = 0.0;    // <-delta e^{-b|x|}, phi>
  double symbolic = 0.0;    // reduced d/db(delta/|x| e^{-b|x|}) paired with phi
  double finite_diff = 0.0; // central difference of the finite-part bracket in b
  double tolerance = 0.0;   // max(1e-6, db^2) |phi(0)|
};

/// Throws InvalidParameter unless 0 < db < 0.1.
HellmannFeynman hellmann_feynman_check(double b, const testfn::TestFunction& phi, double db,
                                       const dist::PairingConfig& cfg = {});

struct CutoffPoint {
  double cutoff = 0.0;
  double integral = 0.0;
  double ratio() const { return integral / cutoff; }
};

/// I(L) = integral over |k| < L of d^3k / ((hbar^2/2m) 4 pi^2 |k|^2 + |E|),
/// the naive resolvent diagonal under the e^{-2 pi i k.x} Fourier convention.
/// Throws InvalidParameter for E >= 0 or non-ascending / non-positive cutoffs.
std::vector<CutoffPoint> cutoff_scan(const PhysParams& p, double energy,
                                     const std::vector<double>& cutoffs);

/// 2m / (pi hbar^2), the asymptotic slope of I(L).
double cutoff_slope(const PhysParams& p);

}  // namespace cspec::spectral
