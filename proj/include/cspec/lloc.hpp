#pragma once

// Local square integrability of radial kernels, checked two ways: integrals
// over balls about the singular point, and integrals against plateau
// functions. The two verdicts are expected to agree.

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cspec::lloc {

struct Kernel {
  std::string id;
  std::function<double(double)> profile;  // T(r), r > 0
};

/// e^{-r}/r, 1/r, 1/r^2, 1, |x|.
std::vector<Kernel> corpus();

struct LocalNorm {
  double radius = 0.0;
  /// Empty when refinement grows without bound.
  std::optional<double> value;
  double error_estimate = 0.0;

  bool divergent() const noexcept { return !value; }
};

/// Integral of |T|^2 over the ball of the given radius. Panels are doubled
/// from 8; four consecutive growth ratios above 1.5 flag divergence. Throws
/// NumericalDomainError when refinement neither converges nor diverges.
LocalNorm local_l2_norm(const Kernel& t, double ball_radius);

/// Same procedure for the integral of |w T|^2 over the ball.
LocalNorm weighted_l2_norm(const Kernel& t, const std::function<double(double)>& w,
                           double ball_radius);

enum class Verdict { LocallyL2, NotLocallyL2 };
const char* to_string(Verdict v);

struct PlateauCheck {
  LocalNorm on_k;       // integral over K of |T|^2
  LocalNorm weighted;   // integral of |phi_K T|^2
  LocalNorm outer;      // sup|phi_K|^2 times the integral over supp(phi_K) of |T|^2
  bool sandwich_holds = false;
};

struct LocalL2Report {
  std::string kernel_id;
  std::vector<LocalNorm> balls;
  PlateauCheck plateau;
  Verdict ball_verdict = Verdict::NotLocallyL2;     // Definition via compact balls
  Verdict plateau_verdict = Verdict::NotLocallyL2;  // Definition via test functions
  bool equivalent = false;
  Verdict verdict = Verdict::NotLocallyL2;
};

/// Throws InvalidParameter unless k_radius > 0 and epsilon > 0.
LocalL2Report verify_bse(const Kernel& t, double k_radius, double epsilon);

}  // namespace cspec::lloc
