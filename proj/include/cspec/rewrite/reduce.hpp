#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cspec/rewrite/expr.hpp"

namespace cspec::rewrite {

enum class Rule {
  Scaling,          // R1: (1/2d) |x|^2 lap(delta) -> delta
  Triviality,       // R2: delta/|x| * f_smooth -> 0
  ProductExp,       // R3: delta/|x| * exp(c|x|) * f -> c f(0) delta
  YukawaLaplacian,  // R4: lap(exp(c|x|)/|x|) -> -4 pi delta + c^2 exp(c|x|)/|x|
  HellmannFeynman,  // R5: d/db(delta/|x| exp(c|x|)) -> (dc/db) delta
  Absorb,           // R6: delta/|x| * |x|^p -> delta * |x|^(p-1)
  Sift,             // delta * f_continuous -> f(0) delta
  LapLinearity,     // lap over sums and scalars
  DiffB,            // d/db by the Leibniz rule
  Distribute,       // products over sums
};

const char* rule_name(Rule r);
std::vector<Rule> default_priority();

struct ReduceOptions {
  std::vector<Rule> priority = default_priority();
  /// d in the scaling rule.
  int dimension = 3;
  int max_steps = 10000;
};

struct TraceStep {
  Rule rule;
  Expr before;  // rewritten subterm
  Expr after;
};

/// "rule-name: before => after"
std::string format_step(const TraceStep& s);

/// coeff * exp(exp_coeff |x|) * |x|^power
struct KernelTerm {
  Scalar coeff;
  Scalar exp_coeff;
  int power = 0;
};

struct CanonicalForm {
  Scalar delta_coeff;
  std::vector<KernelTerm> kernel_terms;
  std::vector<Expr> unresolved;
  /// Set when the input was a bracket <e,(name)>.
  std::optional<std::string> test_function;

  bool complete() const noexcept { return unresolved.empty(); }
  Expr to_expr() const;
  std::string to_string() const;
};

bool operator==(const CanonicalForm& a, const CanonicalForm& b);

struct Reduction {
  CanonicalForm form;
  Expr normal_form;
  std::vector<TraceStep> trace;
};

/// Rewrites to a normal form, applying the highest-priority applicable rule
/// at the first pre-order position each step. Throws Error past max_steps.
Reduction reduce(const Expr& e, const ReduceOptions& opts = {});

struct Redex {
  Rule rule;
  std::vector<std::size_t> path;  // child indices from the root
  Expr replacement;
};

/// Every (rule, position) rewrite available in e.
std::vector<Redex> all_redexes(const Expr& e, const ReduceOptions& opts = {});
Expr apply_redex(const Expr& root, const Redex& r);

/// Canonical forms of all normal forms reachable by any sequence of redex
/// choices. Throws Error when more than state_limit terms are visited.
std::set<std::string> reachable_normal_forms(const Expr& e, const ReduceOptions& opts = {},
                                             std::size_t state_limit = 20000);

CanonicalForm canonicalize(const Expr& normal_form);

/// Syntactic smoothness at 0: even |x| powers and sin/cos/exp of even
/// polynomials in |x|.
bool is_smooth(const Expr& f);
/// Value at 0 when f is continuous there.
std::optional<Scalar> value_at_zero(const Expr& f);

}  // namespace cspec::rewrite
