#include "cspec/lloc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cspec/error.hpp"
#include "cspec/quad.hpp"
#include "cspec/testfn.hpp"

namespace cspec::lloc {

namespace {

constexpr int kStartPanels = 8;
constexpr int kMaxLevels = 14;
constexpr int kGrowthRun = 4;
constexpr double kGrowthRatio = 1.5;
constexpr double kConverged = 1e-12;

LocalNorm refine(const std::function<double(double)>& integrand, double radius,
                 const std::string& id) {
  if (!(radius > 0.0)) throw InvalidParameter("ball radius must be positive");
  LocalNorm out{radius, std::nullopt, 0.0};
  double prev = 0.0;
  int growth = 0;
  for (int level = 0; level < kMaxLevels; ++level) {
    const quad::RadialGrid grid(radius, kStartPanels << level, 16);
    const double v = quad::integrate_radial_once(integrand, grid);
    if (level > 0) {
      growth = (prev > 0.0 && v / prev > kGrowthRatio) ? growth + 1 : 0;
      if (growth >= kGrowthRun) return out;
      const double diff = std::abs(v - prev);
      if (diff <= kConverged * std::max(std::abs(v), 1e-300) || (v == 0.0 && prev == 0.0)) {
        out.value = v;
        out.error_estimate = diff;
        return out;
      }
    }
    prev = v;
  }
  std::ostringstream os;
  os << "kernel " << id << ": refinement on the ball of radius " << radius
     << " neither converged nor diverged";
  throw NumericalDomainError(os.str());
}

bool le(const LocalNorm& a, const LocalNorm& b) {
  const double slack = a.error_estimate + b.error_estimate + 1e-12 * std::abs(*b.value);
  return *a.value <= *b.value + slack;
}

}  // namespace

std::vector<Kernel> corpus() {
  return {
      {"exp(-|x|)/|x|", [](double r) { return std::exp(-r) / r; }},
      {"1/|x|", [](double r) { return 1.0 / r; }},
      {"1/|x|^2", [](double r) { return 1.0 / (r * r); }},
      {"1", [](double) { return 1.0; }},
      {"|x|", [](double r) { return r; }},
  };
}

LocalNorm local_l2_norm(const Kernel& t, double ball_radius) {
  return refine(
      [&t](double r) {
        const double v = t.profile(r);
        return v * v;
      },
      ball_radius, t.id);
}

LocalNorm weighted_l2_norm(const Kernel& t, const std::function<double(double)>& w,
                           double ball_radius) {
  return refine(
      [&t, &w](double r) {
        const double v = w(r) * t.profile(r);
        return v * v;
      },
      ball_radius, t.id);
}

const char* to_string(Verdict v) {
  return v == Verdict::LocallyL2 ? "locally-L2" : "not-locally-L2";
}

LocalL2Report verify_bse(const Kernel& t, double k_radius, double epsilon) {
  if (!(k_radius > 0.0) || !(epsilon > 0.0))
    throw InvalidParameter("verify_bse: K radius and epsilon must be positive");
  LocalL2Report rep;
  rep.kernel_id = t.id;

  const testfn::PlateauFunction phi_k = testfn::plateau_new(k_radius, epsilon);
  const double outer = phi_k.outer_radius();
  const auto plateau_weight = [&phi_k](double r) { return phi_k.radial_value(r); };

  rep.plateau.on_k = local_l2_norm(t, k_radius);
  rep.plateau.weighted = weighted_l2_norm(t, plateau_weight, outer);
  // sup|phi_K| = 1 for the plateau profile.
  rep.plateau.outer = local_l2_norm(t, outer);
  const auto& p = rep.plateau;
  rep.plateau.sandwich_holds = !p.on_k.divergent() && !p.weighted.divergent() &&
                               !p.outer.divergent() && le(p.on_k, p.weighted) &&
                               le(p.weighted, p.outer);

  bool balls_finite = true;
  for (double r : {0.5 * k_radius, k_radius, outer, 2.0 * outer}) {
    rep.balls.push_back(local_l2_norm(t, r));
    balls_finite = balls_finite && !rep.balls.back().divergent();
  }
  bool plateaus_finite = !p.weighted.divergent();
  for (double inner : {0.5 * k_radius, 2.0 * k_radius}) {
    const testfn::PlateauFunction f = testfn::plateau_new(inner, epsilon);
    plateaus_finite =
        plateaus_finite &&
        !weighted_l2_norm(t, [&f](double r) { return f.radial_value(r); }, f.outer_radius())
             .divergent();
  }
  rep.ball_verdict = balls_finite ? Verdict::LocallyL2 : Verdict::NotLocallyL2;
  rep.plateau_verdict = plateaus_finite ? Verdict::LocallyL2 : Verdict::NotLocallyL2;
  rep.equivalent = rep.ball_verdict == rep.plateau_verdict;
  rep.verdict = rep.ball_verdict;
  return rep;
}

}  // namespace cspec::lloc
