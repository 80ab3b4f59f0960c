#include "cspec/rewrite/expr.hpp"

#include <algorithm>
#include <map>

#include "cspec/error.hpp"

namespace cspec::rewrite {

namespace {

Expr make(Kind k, Span span) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->span = span;
  return n;
}

int rank(Kind k) {
  switch (k) {
    case Kind::Scalar: return -1;
    case Kind::Delta: return 0;
    case Kind::DeltaOverAbsX: return 1;
    case Kind::Lap: return 2;
    case Kind::DerivB: return 3;
    case Kind::Bracket: return 4;
    case Kind::Func: return 5;
    case Kind::Sum: return 6;
    case Kind::Exp: return 7;
    case Kind::AbsX: return 8;
    case Kind::Scale:
    case Kind::Prod: return 9;
  }
  return 10;
}

bool factor_less(const Expr& a, const Expr& b) {
  if (rank(a->kind) != rank(b->kind)) return rank(a->kind) < rank(b->kind);
  return print(a) < print(b);
}

std::string abs_text(int p) { return p == 1 ? "|x|" : "|x|^" + std::to_string(p); }

std::string factor_text(const Expr& f) {
  return f->kind == Kind::Sum ? "(" + print(f) + ")" : print(f);
}

/// Product text for a list of factors; negative |x| powers become divisions.
/// Returns an empty numerator when every factor is a denominator.
std::pair<std::string, std::string> product_text(const std::vector<Expr>& factors) {
  std::string num, den;
  for (const auto& f : factors) {
    if (f->kind == Kind::AbsX && f->power < 0) {
      den += "/" + abs_text(-f->power);
    } else {
      if (!num.empty()) num += "*";
      num += factor_text(f);
    }
  }
  return {num, den};
}

}  // namespace

Expr scalar(Scalar s, Span span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scalar;
  n->coeff = std::move(s);
  n->span = span;
  return n;
}

Expr delta(Span span) { return make(Kind::Delta, span); }

Expr delta_over_abs_x(Span span) { return make(Kind::DeltaOverAbsX, span); }

Expr abs_x(int power, Span span) {
  if (power == 0) return scalar(Scalar::number(1), span);
  auto n = std::make_shared<Node>();
  n->kind = Kind::AbsX;
  n->power = power;
  n->span = span;
  return n;
}

Expr exp_abs(Scalar c, Span span) {
  if (c.is_zero()) return scalar(Scalar::number(1), span);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->coeff = std::move(c);
  n->span = span;
  return n;
}

Expr func(const std::string& name, Expr arg, Span span) {
  if (name == "exp") {
    if (arg->kind == Kind::AbsX && arg->power == 1) return exp_abs(Scalar::number(1), span);
    if (arg->kind == Kind::Scale && arg->children[0]->kind == Kind::AbsX &&
        arg->children[0]->power == 1)
      return exp_abs(arg->coeff, span);
  }
  if (arg->kind == Kind::Scalar && arg->coeff.is_zero()) {
    if (name == "sin") return scalar(Scalar{}, span);
    if (name == "cos" || name == "exp") return scalar(Scalar::number(1), span);
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Func;
  n->name = name;
  n->children = {std::move(arg)};
  n->span = span;
  return n;
}

Expr lap(Expr child, Span span) {
  if (child->kind == Kind::Scalar) return scalar(Scalar{}, span);
  auto n = make(Kind::Lap, span);
  std::const_pointer_cast<Node>(n)->children = {std::move(child)};
  return n;
}

Expr deriv_b(Expr child, Span span) {
  auto n = make(Kind::DerivB, span);
  std::const_pointer_cast<Node>(n)->children = {std::move(child)};
  return n;
}

Expr scale(Scalar s, Expr child, Span span) {
  if (s.is_zero()) return scalar(Scalar{}, span);
  if (s == Scalar::number(1)) return child;
  switch (child->kind) {
    case Kind::Scalar: return scalar(s * child->coeff, span);
    case Kind::Scale: return scale(s * child->coeff, child->children[0], span);
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : child->children) terms.push_back(scale(s, t));
      return sum(std::move(terms), span);
    }
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->coeff = std::move(s);
  n->children = {std::move(child)};
  n->span = span;
  return n;
}

Expr prod(std::vector<Expr> factors, Span span) {
  Scalar c = Scalar::number(1);
  int p = 0;
  Scalar ec;
  std::vector<Expr> rest;
  std::vector<Expr> work(factors.rbegin(), factors.rend());
  while (!work.empty()) {
    Expr f = std::move(work.back());
    work.pop_back();
    switch (f->kind) {
      case Kind::Scalar: c = c * f->coeff; break;
      case Kind::Scale:
        c = c * f->coeff;
        work.push_back(f->children[0]);
        break;
      case Kind::Prod:
        for (auto it = f->children.rbegin(); it != f->children.rend(); ++it) work.push_back(*it);
        break;
      case Kind::AbsX: p += f->power; break;
      case Kind::Exp: ec = ec + f->coeff; break;
      default: rest.push_back(std::move(f)); break;
    }
  }
  if (c.is_zero()) return scalar(Scalar{}, span);
  if (p < 0) {
    const auto d = std::find_if(rest.begin(), rest.end(),
                                [](const Expr& f) { return f->kind == Kind::Delta; });
    if (d != rest.end()) {
      *d = delta_over_abs_x((*d)->span);
      ++p;
    }
  }
  if (p != 0) rest.push_back(abs_x(p));
  if (!ec.is_zero()) rest.push_back(exp_abs(ec));
  std::stable_sort(rest.begin(), rest.end(), factor_less);
  if (rest.empty()) return scalar(c, span);
  if (rest.size() == 1) return scale(c, rest.front(), span);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Prod;
  n->children = std::move(rest);
  n->span = span;
  return scale(c, n, span);
}

Expr sum(std::vector<Expr> terms, Span span) {
  // Collect like terms keyed by their non-scalar part.
  struct Group {
    Scalar coeff;
    Expr spatial;  // null for pure scalars
  };
  std::map<std::pair<int, std::string>, Group> groups;
  std::vector<Expr> work(terms.rbegin(), terms.rend());
  while (!work.empty()) {
    Expr t = std::move(work.back());
    work.pop_back();
    if (t->kind == Kind::Sum) {
      for (auto it = t->children.rbegin(); it != t->children.rend(); ++it) work.push_back(*it);
      continue;
    }
    Scalar c = Scalar::number(1);
    Expr x = t;
    if (t->kind == Kind::Scalar) {
      c = t->coeff;
      x = nullptr;
    } else if (t->kind == Kind::Scale) {
      c = t->coeff;
      x = t->children[0];
    }
    const auto key = x ? std::make_pair(rank(x->kind), print(x)) : std::make_pair(-1, std::string());
    auto [it, inserted] = groups.try_emplace(key, Group{c, x});
    if (!inserted) it->second.coeff = it->second.coeff + c;
  }
  std::vector<Expr> out;
  for (auto& [key, g] : groups) {
    if (g.coeff.is_zero()) continue;
    out.push_back(g.spatial ? scale(g.coeff, g.spatial) : scalar(g.coeff));
  }
  if (out.empty()) return scalar(Scalar{}, span);
  if (out.size() == 1) return out.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->children = std::move(out);
  n->span = span;
  return n;
}

Expr bracket(Expr child, const std::string& test_function, Span span) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bracket;
  n->name = test_function;
  n->children = {std::move(child)};
  n->span = span;
  return n;
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator*(const Expr& a, const Expr& b) { return prod({a, b}); }

Expr rebuild(const Node& n, std::vector<Expr> children) {
  switch (n.kind) {
    case Kind::Func: return func(n.name, children.at(0), n.span);
    case Kind::Lap: return lap(children.at(0), n.span);
    case Kind::DerivB: return deriv_b(children.at(0), n.span);
    case Kind::Scale: return scale(n.coeff, children.at(0), n.span);
    case Kind::Prod: return prod(std::move(children), n.span);
    case Kind::Sum: return sum(std::move(children), n.span);
    case Kind::Bracket: return bracket(children.at(0), n.name, n.span);
    default: return std::make_shared<Node>(n);
  }
}

std::string print(const Expr& e) {
  switch (e->kind) {
    case Kind::Scalar: return e->coeff.to_string();
    case Kind::Delta: return "delta";
    case Kind::DeltaOverAbsX: return "delta/|x|";
    case Kind::AbsX: return e->power > 0 ? abs_text(e->power) : "1/" + abs_text(-e->power);
    case Kind::Exp: return "exp(" + print(scale(e->coeff, abs_x(1))) + ")";
    case Kind::Func: return e->name + "(" + print(e->children[0]) + ")";
    case Kind::Lap: return "lap(" + print(e->children[0]) + ")";
    case Kind::DerivB: return "d/db(" + print(e->children[0]) + ")";
    case Kind::Bracket: return "<" + print(e->children[0]) + ",(" + e->name + ")>";
    case Kind::Prod: {
      auto [num, den] = product_text(e->children);
      return (num.empty() ? "1" : num) + den;
    }
    case Kind::Scale: {
      const Expr& x = e->children[0];
      auto [num, den] = x->kind == Kind::Prod ? product_text(x->children) : product_text({x});
      const Scalar& s = e->coeff;
      std::string head;
      if (s == Scalar::number(-1)) {
        head = num.empty() ? "-1" : "-";
      } else if (s.needs_parens()) {
        head = "(" + s.to_string() + ")" + (num.empty() ? "" : "*");
      } else {
        head = s.to_string() + (num.empty() ? "" : "*");
      }
      return head + num + den;
    }
    case Kind::Sum: {
      std::string out;
      for (const auto& t : e->children) {
        const std::string s = print(t);
        if (out.empty()) {
          out = s;
        } else if (s.front() == '-') {
          out += " - " + s.substr(1);
        } else {
          out += " + " + s;
        }
      }
      return out;
    }
  }
  return "?";
}

bool equal(const Expr& a, const Expr& b) { return print(a) == print(b); }

int node_count(const Expr& e) {
  int n = 1;
  for (const auto& c : e->children) n += node_count(c);
  return n;
}

bool contains_symbol(const Expr& e, const std::string& symbol) {
  if (e->coeff.depends_on(symbol)) return true;
  return std::any_of(e->children.begin(), e->children.end(),
                     [&](const Expr& c) { return contains_symbol(c, symbol); });
}

int singular_count(const Expr& e) {
  int n = (e->kind == Kind::Delta || e->kind == Kind::DeltaOverAbsX) ? 1 : 0;
  for (const auto& c : e->children) n += singular_count(c);
  return n;
}

}  // namespace cspec::rewrite
