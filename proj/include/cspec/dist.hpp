#pragma once

// Distributions on R^3 supported by the engine and their Schwartz brackets
// <T, phi>. Point evaluations are exact, regular radial kernels go through
// radial quadrature of spherical means, and the singular product
// delta/|x| * g is realized as the Hadamard finite part of spherical means of
// g * phi / |x| as r -> 0.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cspec/quad.hpp"
#include "cspec/radial_factor.hpp"
#include "cspec/testfn.hpp"

namespace cspec::dist {

class Distribution;

struct DeltaAtOrigin {
  double coeff = 1.0;
};

/// coeff * k(|x|) with |k(r)| r^2 bounded near 0.
struct RadialKernel {
  double coeff = 1.0;
  std::string name;
  std::function<double(double)> profile;
};

/// coeff * (delta/|x|) * g
struct SingularDeltaOverR {
  double coeff = 1.0;
  RadialFactor factor;
};

struct WeakLaplacianOf {
  std::shared_ptr<const Distribution> inner;
};

struct Sum {
  std::vector<Distribution> terms;
};

class Distribution {
public:
  using Node = std::variant<DeltaAtOrigin, RadialKernel, SingularDeltaOverR, WeakLaplacianOf, Sum>;

  const Node& node() const noexcept { return node_; }

  static Distribution delta(double coeff = 1.0);
  /// Throws NumericalDomainError when |k(r)| r^2 grows as r -> 0.
  static Distribution kernel(std::string name, std::function<double(double)> profile,
                             double coeff = 1.0);
  static Distribution singular(RadialFactor g, double coeff = 1.0);
  static Distribution laplacian(const Distribution& inner);
  /// Flattens nested sums.
  static Distribution sum(std::vector<Distribution> terms);

  friend Distribution operator+(const Distribution& a, const Distribution& b);
  /// Folds the scalar into coefficient fields.
  friend Distribution operator*(double s, const Distribution& d);

private:
  explicit Distribution(Node n) : node_(std::move(n)) {}
  Node node_;
};

enum class Method { PointEval, Quadrature, FinitePart, WeakLaplacian };

const char* to_string(Method m);

struct BracketResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Method method = Method::PointEval;
  /// Present for finite-part evaluations.
  std::optional<quad::PoleFit> fit;
};

struct PairingConfig {
  int panels = 64;
  int nodes_per_panel = 16;
  int polar_order = 32;
  int azimuthal_count = 32;
  std::vector<double> radii = quad::default_radii_ladder();
  quad::AdaptiveFitOptions fit;
  /// pair_singular raises FitQualityError above rms_limit * (|A| + |B| + max sample).
  double rms_limit = 1e-4;
};

BracketResult pair(const Distribution& t, const testfn::TestFunction& phi,
                   const PairingConfig& cfg = {});

/// Finite part of r -> sphere_average(g * phi / |x|, r) on the radii ladder.
BracketResult pair_singular(const RadialFactor& g, const testfn::TestFunction& phi,
                            const PairingConfig& cfg = {});

/// Independent route through delta/|x| = (1/6)|x| lap(delta):
/// finite part of r -> (1/6) sphere_average(lap(|x| g phi), r), with the
/// Laplacian expanded by the product rule from closed-form derivatives.
BracketResult pair_singular_laplacian_route(const RadialFactor& g,
                                            const testfn::TestFunction& phi,
                                            const PairingConfig& cfg = {});

/// <f lap(delta), phi> = lap(f phi)(0), realized as the finite part of the
/// spherical means of lap(f phi) as r -> 0; the means carry a 1/r pole when
/// f ~ |x| near 0. Requires slope data for f.
BracketResult pair_laplacian_delta(const RadialFactor& f, const testfn::TestFunction& phi,
                                   const PairingConfig& cfg = {});

/// (1/2d) lap(|x|^2 phi)(0) / phi(0) for phi's radial profile viewed in R^d.
double scaling_identity_check(int d, const testfn::TestFunction& phi);

/// Finite-part pairing of a factor smooth at 0 (g'(0+) = 0); the bracket is
/// expected to vanish. Throws InvalidParameter for a non-smooth factor.
BracketResult smooth_factor_triviality(const RadialFactor& f, const testfn::TestFunction& phi,
                                       const PairingConfig& cfg = {});

/// Samples of the pole-fit input for diagnostics.
std::vector<quad::RadialSample> singular_samples(const RadialFactor& g,
                                                 const testfn::TestFunction& phi,
                                                 const PairingConfig& cfg = {});

}  // namespace cspec::dist
