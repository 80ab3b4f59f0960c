#include "cspec/rewrite/verify.hpp"

#include <algorithm>
#include <cmath>

#include "cspec/error.hpp"

namespace cspec::rewrite {

namespace {

using dist::BracketResult;
using dist::Distribution;
using dist::Jet;

double power_term(double k, double r, int e) { return k == 0.0 ? 0.0 : k * std::pow(r, e); }

Jet eval_jet(const Expr& e, double r, const Bindings& b) {
  switch (e->kind) {
    case Kind::Scalar: return {e->coeff.evaluate(b), 0.0, 0.0};
    case Kind::AbsX: {
      const int n = e->power;
      return {std::pow(r, n), power_term(n, r, n - 1), power_term(n * (n - 1.0), r, n - 2)};
    }
    case Kind::Exp: {
      const double c = e->coeff.evaluate(b);
      const double v = std::exp(c * r);
      return {v, c * v, c * c * v};
    }
    case Kind::Func: {
      const Jet u = eval_jet(e->children[0], r, b);
      double f0 = 0, f1 = 0, f2 = 0;  // outer function and its derivatives at u
      if (e->name == "sin") {
        f0 = std::sin(u.value), f1 = std::cos(u.value), f2 = -f0;
      } else if (e->name == "cos") {
        f0 = std::cos(u.value), f1 = -std::sin(u.value), f2 = -f0;
      } else if (e->name == "exp") {
        f0 = f1 = f2 = std::exp(u.value);
      } else {
        throw InvalidParameter("no numeric evaluator for function '" + e->name + "'");
      }
      return {f0, f1 * u.d1, f2 * u.d1 * u.d1 + f1 * u.d2};
    }
    case Kind::Scale: return e->coeff.evaluate(b) * eval_jet(e->children[0], r, b);
    case Kind::Sum: {
      Jet acc;
      for (const auto& t : e->children) acc = acc + eval_jet(t, r, b);
      return acc;
    }
    case Kind::Prod: {
      Jet acc{1.0, 0.0, 0.0};
      for (const auto& f : e->children) acc = acc * eval_jet(f, r, b);
      return acc;
    }
    default:
      throw InvalidParameter("'" + print(e) + "' is not a regular radial factor");
  }
}

bool is_regular(const Expr& e) {
  switch (e->kind) {
    case Kind::Scalar:
    case Kind::AbsX:
    case Kind::Exp: return true;
    case Kind::Func:
    case Kind::Scale:
    case Kind::Sum:
    case Kind::Prod:
      for (const auto& c : e->children)
        if (!is_regular(c)) return false;
      return true;
    default: return false;
  }
}

dist::RadialFactor factor_of(const Expr& g, const Bindings& b) {
  auto jet = [g, b](double r) { return eval_jet(g, r, b); };
  const Jet at0 = jet(0.0);
  std::optional<double> slope;
  if (std::isfinite(at0.value) && std::isfinite(at0.d1)) slope = at0.d1;
  return dist::RadialFactor(print(g), jet, slope);
}

Distribution kernel_of(const Expr& e, const Bindings& b) {
  return Distribution::kernel(print(e), [e, b](double r) { return eval_jet(e, r, b).value; });
}

Distribution to_distribution(const Expr& e, const Bindings& b) {
  switch (e->kind) {
    case Kind::Delta: return Distribution::delta();
    case Kind::DeltaOverAbsX: return Distribution::singular(dist::RadialFactor::constant(1.0));
    case Kind::Lap: return Distribution::laplacian(to_distribution(e->children[0], b));
    case Kind::Scale: return e->coeff.evaluate(b) * to_distribution(e->children[0], b);
    case Kind::Sum: {
      std::vector<Distribution> terms;
      for (const auto& t : e->children) terms.push_back(to_distribution(t, b));
      return Distribution::sum(std::move(terms));
    }
    case Kind::Prod: {
      const auto& fs = e->children;
      std::vector<Expr> rest;
      Expr singular;
      for (const auto& f : fs) {
        if (is_regular(f)) {
          rest.push_back(f);
        } else if (f->kind == Kind::Sum) {
          // Distribute so each term carries at most one non-regular factor.
          std::vector<Expr> terms;
          for (const auto& t : f->children) {
            auto parts = fs;
            for (auto& p : parts)
              if (p == f) p = t;
            terms.push_back(prod(std::move(parts)));
          }
          return to_distribution(sum(std::move(terms)), b);
        } else if (singular) {
          throw InvalidParameter("no numeric oracle for the product of two singular factors in '" +
                                 print(e) + "'");
        } else {
          singular = f;
        }
      }
      if (!singular) return kernel_of(e, b);
      const Expr g = prod(rest);
      if (singular->kind == Kind::Delta) {
        const double v = eval_jet(g, 0.0, b).value;
        if (!std::isfinite(v)) throw InvalidParameter("factor " + print(g) + " is not finite at 0");
        return Distribution::delta(v);
      }
      if (singular->kind == Kind::DeltaOverAbsX) return Distribution::singular(factor_of(g, b));
      throw InvalidParameter("no numeric oracle for '" + print(e) + "'");
    }
    case Kind::DerivB:
    case Kind::Bracket:
      throw InvalidParameter("'" + print(e) + "' must appear at the top level of a bracket");
    default: return kernel_of(e, b);
  }
}

int rank(dist::Method m) {
  switch (m) {
    case dist::Method::PointEval: return 0;
    case dist::Method::Quadrature: return 1;
    case dist::Method::WeakLaplacian: return 2;
    case dist::Method::FinitePart: return 3;
  }
  return 0;
}

void accumulate(BracketResult& acc, const BracketResult& r, double s) {
  acc.value += s * r.value;
  acc.error_estimate += std::abs(s) * r.error_estimate;
  if (rank(r.method) > rank(acc.method)) acc.method = r.method;
  if (r.fit && !acc.fit) acc.fit = r.fit;
}

}  // namespace

BracketResult numeric_bracket(const Expr& e, const testfn::TestFunction& phi,
                              const Bindings& bindings, const dist::PairingConfig& cfg) {
  switch (e->kind) {
    case Kind::Bracket: return numeric_bracket(e->children[0], phi, bindings, cfg);
    case Kind::Sum: {
      BracketResult acc;
      for (const auto& t : e->children) accumulate(acc, numeric_bracket(t, phi, bindings, cfg), 1.0);
      return acc;
    }
    case Kind::Scale: {
      BracketResult acc;
      accumulate(acc, numeric_bracket(e->children[0], phi, bindings, cfg),
                 e->coeff.evaluate(bindings));
      return acc;
    }
    case Kind::DerivB: {
      const auto it = bindings.find("b");
      if (it == bindings.end()) throw InvalidParameter("d/db requires a binding for b");
      const auto at = [&](double bv) {
        Bindings shifted = bindings;
        shifted["b"] = bv;
        return numeric_bracket(e->children[0], phi, shifted, cfg);
      };
      // Central differences at h and h/2; their spread estimates truncation.
      const double h = 1e-3;
      const auto central = [&](double step, double& err) {
        const BracketResult p = at(it->second + step);
        const BracketResult m = at(it->second - step);
        err = (p.error_estimate + m.error_estimate) / (2.0 * step);
        return BracketResult{(p.value - m.value) / (2.0 * step), 0.0, p.method, p.fit};
      };
      double e1 = 0, e2 = 0;
      const BracketResult coarse = central(h, e1);
      BracketResult fine = central(h / 2.0, e2);
      fine.error_estimate = e2 + std::abs(fine.value - coarse.value);
      return fine;
    }
    case Kind::Prod: {
      // f * lap(delta) pairs to lap(f phi)(0).
      const auto& fs = e->children;
      const auto l = std::find_if(fs.begin(), fs.end(), [](const Expr& f) {
        return f->kind == Kind::Lap && f->children[0]->kind == Kind::Delta;
      });
      if (l != fs.end()) {
        std::vector<Expr> rest;
        for (const auto& f : fs)
          if (f != *l) rest.push_back(f);
        const Expr g = prod(rest);
        if (!is_regular(g))
          throw InvalidParameter("no numeric oracle for '" + print(e) + "'");
        return dist::pair_laplacian_delta(factor_of(g, bindings), phi, cfg);
      }
      return dist::pair(to_distribution(e, bindings), phi, cfg);
    }
    default: return dist::pair(to_distribution(e, bindings), phi, cfg);
  }
}

BracketResult canonical_bracket(const CanonicalForm& f, const testfn::TestFunction& phi,
                                const Bindings& bindings, const dist::PairingConfig& cfg) {
  if (!f.complete()) throw Error("reduction incomplete: " + f.to_string());
  std::vector<Distribution> terms{Distribution::delta(f.delta_coeff.evaluate(bindings))};
  for (const auto& k : f.kernel_terms) {
    const Expr kernel = scale(k.coeff, prod({exp_abs(k.exp_coeff), abs_x(k.power)}));
    terms.push_back(kernel_of(kernel, bindings));
  }
  return dist::pair(Distribution::sum(std::move(terms)), phi, cfg);
}

Verification verify_reduction(const Expr& e, const testfn::TestFunction& phi,
                              const Bindings& bindings, const dist::PairingConfig& cfg,
                              const ReduceOptions& opts) {
  Verification v;
  v.form = reduce(e, opts).form;
  const BracketResult lhs = numeric_bracket(e, phi, bindings, cfg);
  const BracketResult rhs = canonical_bracket(v.form, phi, bindings, cfg);
  v.lhs = lhs.value;
  v.rhs = rhs.value;
  v.gap = std::abs(lhs.value - rhs.value);
  v.tolerance = lhs.error_estimate + rhs.error_estimate +
                1e-10 * (1.0 + std::abs(lhs.value) + std::abs(rhs.value));
  return v;
}

const std::vector<std::string>& regression_corpus() {
  static const std::vector<std::string> corpus = {
      "delta",
      "delta/|x|",
      "delta/|x| * exp(-b*|x|)",
      "2*delta/|x|*exp(-2*b*|x|)",
      "lap(exp(-b*|x|)/|x|)",
      "lap(1/|x|)",
      "d/db(delta/|x|*exp(-b*|x|))",
      "d/db(b*delta/|x|*exp(-b*|x|))",
      "delta/|x| * |x|",
      "delta/|x| * |x|^2",
      "delta/|x| * (1 + |x|^2)",
      "delta/|x| * cos(|x|^2)",
      "(|x|^2/(2*3))*lap(delta)",
      "delta/|x|*exp(-b*|x|)*|x|",
      "delta/|x|*(exp(-b*|x|) + |x|)",
      "delta*exp(-b*|x|)",
      "lap(exp(-b*|x|)/|x|) + b*delta/|x|*exp(-b*|x|)",
      "<delta/|x|*exp(-b*|x|),(phi)>",
      "E*sqrt(b/(2*pi))*exp(-b*|x|)/|x|",
      hpsi_expression(),
  };
  return corpus;
}

const std::string& hpsi_expression() {
  static const std::string e =
      "(-hbar^2/(2*m))*lap(sqrt(b/(2*pi))*exp(-b*|x|)/|x|) - "
      "alpha*delta/|x|*exp(-b*|x|)*sqrt(b/(2*pi))";
  return e;
}

}  // namespace cspec::rewrite
