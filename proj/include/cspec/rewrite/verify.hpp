#pragma once

// Numeric cross-validation of reductions: the input expression is paired with
// phi through the dist oracles, the canonical form through exact delta
// evaluation plus radial quadrature.

#include "cspec/dist.hpp"
#include "cspec/rewrite/reduce.hpp"
#include "cspec/testfn.hpp"

namespace cspec::rewrite {

/// Numeric bracket <e, phi>. d/db is taken by central difference in the bound
/// value of b. Throws InvalidParameter for constructs without a numeric oracle
/// (two singular factors, products with a Laplacian, unbound symbols).
dist::BracketResult numeric_bracket(const Expr& e, const testfn::TestFunction& phi,
                                    const Bindings& bindings,
                                    const dist::PairingConfig& cfg = {});

/// Bracket of a complete canonical form. Throws Error when unresolved terms remain.
dist::BracketResult canonical_bracket(const CanonicalForm& f, const testfn::TestFunction& phi,
                                      const Bindings& bindings,
                                      const dist::PairingConfig& cfg = {});

struct Verification {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  /// Sum of both oracle error estimates plus a 1e-10 relative floor for
  /// quadrature round-off.
  double tolerance = 0.0;
  CanonicalForm form;

  bool ok() const noexcept { return gap <= tolerance; }
};

Verification verify_reduction(const Expr& e, const testfn::TestFunction& phi,
                              const Bindings& bindings, const dist::PairingConfig& cfg = {},
                              const ReduceOptions& opts = {});

/// Regression corpus shared by the verify suite and the tests; every entry
/// reduces completely.
const std::vector<std::string>& regression_corpus();

/// The full H psi bracket expression with psi = sqrt(b/2pi) e^{-b|x|}/|x|.
const std::string& hpsi_expression();

}  // namespace cspec::rewrite
