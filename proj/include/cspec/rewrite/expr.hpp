#pragma once

// Immutable expression trees for the distribution language. Construction goes
// through the factory functions below, which apply the silent normalizations
// (flattening, scalar hoisting, merging |x| powers and exponents, folding
// delta*|x|^-1 into delta/|x|, sorting factors and terms).

#include <memory>
#include <string>
#include <vector>

#include "cspec/rewrite/scalar.hpp"

namespace cspec::rewrite {

enum class Kind {
  Scalar,         // scalar coefficient as a standalone term
  Delta,          // delta(x)
  DeltaOverAbsX,  // delta(x)/|x|
  AbsX,           // |x|^power, power != 0
  Exp,            // exp(c*|x|), c = coeff != 0
  Func,           // name(arg) for sin/cos/exp of a non-linear argument
  Lap,            // lap(child)
  DerivB,         // d/db(child)
  Scale,          // coeff * child
  Prod,           // factors, no scalars, at least two
  Sum,            // terms, at least two
  Bracket,        // <child,(name)>
};

/// 1-based columns, end exclusive; {0, 0} when synthesized by the rewriter.
struct Span {
  int begin = 0;
  int end = 0;
};

class Node;
using Expr = std::shared_ptr<const Node>;

class Node {
public:
  Kind kind = Kind::Scalar;
  Scalar coeff;  // Scalar, Exp, Scale
  int power = 0; // AbsX
  std::string name;  // Func, Bracket
  std::vector<Expr> children;
  Span span;
};

Expr scalar(Scalar s, Span span = {});
Expr delta(Span span = {});
Expr delta_over_abs_x(Span span = {});
Expr abs_x(int power, Span span = {});
Expr exp_abs(Scalar c, Span span = {});
/// exp(arg) with a linear argument c*|x| becomes exp_abs(c).
Expr func(const std::string& name, Expr arg, Span span = {});
Expr lap(Expr child, Span span = {});
Expr deriv_b(Expr child, Span span = {});
Expr scale(Scalar s, Expr child, Span span = {});
Expr prod(std::vector<Expr> factors, Span span = {});
Expr sum(std::vector<Expr> terms, Span span = {});
Expr bracket(Expr child, const std::string& test_function, Span span = {});

Expr operator+(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);

/// Rebuilds a node of the same kind from new children via the factories.
Expr rebuild(const Node& n, std::vector<Expr> children);

/// Grammar text; parse(print(e)) reproduces e structurally.
std::string print(const Expr& e);

bool equal(const Expr& a, const Expr& b);
int node_count(const Expr& e);
bool contains_symbol(const Expr& e, const std::string& symbol);

/// Number of Delta / DeltaOverAbsX leaves.
int singular_count(const Expr& e);

}  // namespace cspec::rewrite
