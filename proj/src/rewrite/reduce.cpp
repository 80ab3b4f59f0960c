#include "cspec/rewrite/reduce.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "cspec/error.hpp"

namespace cspec::rewrite {

namespace {

Scalar four_pi() { return Scalar::number(4) * Scalar::symbol("pi"); }

bool is_even_polynomial(const Expr& f) {
  switch (f->kind) {
    case Kind::Scalar: return true;
    case Kind::AbsX: return f->power > 0 && f->power % 2 == 0;
    case Kind::Scale:
    case Kind::Sum:
    case Kind::Prod:
      return std::all_of(f->children.begin(), f->children.end(), is_even_polynomial);
    default: return false;
  }
}

std::size_t count_kind(const std::vector<Expr>& fs, Kind k) {
  return static_cast<std::size_t>(
      std::count_if(fs.begin(), fs.end(), [k](const Expr& f) { return f->kind == k; }));
}

std::vector<Expr> without(const std::vector<Expr>& fs, std::size_t skip) {
  std::vector<Expr> out;
  for (std::size_t k = 0; k < fs.size(); ++k)
    if (k != skip) out.push_back(fs[k]);
  return out;
}

std::size_t index_of(const std::vector<Expr>& fs, Kind k) {
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i]->kind == k) return i;
  return fs.size();
}

std::optional<Scalar> product_at_zero(const std::vector<Expr>& fs) {
  Scalar v = Scalar::number(1);
  for (const auto& f : fs) {
    const auto z = value_at_zero(f);
    if (!z) return std::nullopt;
    v = v * *z;
  }
  return v;
}

Expr zero() { return scalar(Scalar{}); }

std::optional<Expr> scaling(const Expr& n, const ReduceOptions& opts) {
  if (n->kind != Kind::Prod || n->children.size() != 2) return std::nullopt;
  const Expr& l = n->children[0];
  const Expr& a = n->children[1];
  if (l->kind != Kind::Lap || l->children[0]->kind != Kind::Delta) return std::nullopt;
  if (a->kind != Kind::AbsX || (a->power != 1 && a->power != 2)) return std::nullopt;
  const Scalar two_d = Scalar::number(2 * opts.dimension);
  return scale(two_d, a->power == 2 ? delta() : delta_over_abs_x());
}

std::optional<Expr> triviality(const Expr& n, const Node* parent) {
  if (n->kind == Kind::DeltaOverAbsX) {
    if (parent && parent->kind == Kind::Prod) return std::nullopt;
    return zero();
  }
  if (n->kind != Kind::Prod) return std::nullopt;
  const auto& fs = n->children;
  if (count_kind(fs, Kind::DeltaOverAbsX) != 1) return std::nullopt;
  const auto others = without(fs, index_of(fs, Kind::DeltaOverAbsX));
  if (!std::all_of(others.begin(), others.end(), is_smooth)) return std::nullopt;
  return zero();
}

std::optional<Expr> product_exp(const Expr& n) {
  if (n->kind != Kind::Prod) return std::nullopt;
  const auto& fs = n->children;
  if (count_kind(fs, Kind::DeltaOverAbsX) != 1 || count_kind(fs, Kind::Exp) != 1)
    return std::nullopt;
  Scalar c;
  std::vector<Expr> rest;
  for (const auto& f : fs) {
    if (f->kind == Kind::Exp) {
      c = f->coeff;
    } else if (f->kind != Kind::DeltaOverAbsX) {
      if (!is_smooth(f)) return std::nullopt;
      rest.push_back(f);
    }
  }
  const auto v = product_at_zero(rest);
  if (!v) return std::nullopt;
  return scale(c * *v, delta());
}

bool is_yukawa(const Expr& x) {
  return x->kind == Kind::Prod && x->children.size() == 2 &&
         x->children[0]->kind == Kind::Exp && x->children[1]->kind == Kind::AbsX &&
         x->children[1]->power == -1;
}

std::optional<Expr> yukawa_laplacian(const Expr& n) {
  if (n->kind != Kind::Lap) return std::nullopt;
  const Expr& x = n->children[0];
  if (x->kind == Kind::AbsX && x->power == -1) return scale(-four_pi(), delta());
  if (!is_yukawa(x)) return std::nullopt;
  const Scalar c = x->children[0]->coeff;
  return sum({scale(-four_pi(), delta()), scale(c * c, x)});
}

std::optional<Expr> hellmann_feynman(const Expr& n) {
  if (n->kind != Kind::DerivB) return std::nullopt;
  const Expr& x = n->children[0];
  if (x->kind != Kind::Prod || x->children.size() != 2 ||
      x->children[0]->kind != Kind::DeltaOverAbsX || x->children[1]->kind != Kind::Exp)
    return std::nullopt;
  return scale(x->children[1]->coeff.derivative("b"), delta());
}

std::optional<Expr> absorb(const Expr& n) {
  if (n->kind != Kind::Prod) return std::nullopt;
  const auto& fs = n->children;
  if (count_kind(fs, Kind::DeltaOverAbsX) != 1) return std::nullopt;
  const std::size_t a = index_of(fs, Kind::AbsX);
  if (a == fs.size() || fs[a]->power < 1) return std::nullopt;
  std::vector<Expr> out;
  for (const auto& f : fs) {
    if (f->kind == Kind::DeltaOverAbsX) {
      out.push_back(delta());
    } else if (f == fs[a]) {
      out.push_back(abs_x(f->power - 1));
    } else {
      out.push_back(f);
    }
  }
  return prod(std::move(out));
}

std::optional<Expr> sift(const Expr& n) {
  if (n->kind != Kind::Prod) return std::nullopt;
  const auto& fs = n->children;
  if (count_kind(fs, Kind::Delta) != 1 || count_kind(fs, Kind::DeltaOverAbsX) != 0)
    return std::nullopt;
  const auto v = product_at_zero(without(fs, index_of(fs, Kind::Delta)));
  if (!v) return std::nullopt;
  return scale(*v, delta());
}

std::optional<Expr> lap_linearity(const Expr& n) {
  if (n->kind != Kind::Lap) return std::nullopt;
  const Expr& x = n->children[0];
  if (x->kind == Kind::Scale) return scale(x->coeff, lap(x->children[0]));
  if (x->kind == Kind::Sum) {
    std::vector<Expr> terms;
    for (const auto& t : x->children) terms.push_back(lap(t));
    return sum(std::move(terms));
  }
  return std::nullopt;
}

std::optional<Expr> diff_b(const Expr& n) {
  if (n->kind != Kind::DerivB) return std::nullopt;
  const Expr& x = n->children[0];
  switch (x->kind) {
    case Kind::Scalar: return scalar(x->coeff.derivative("b"));
    case Kind::Delta:
    case Kind::DeltaOverAbsX:
    case Kind::AbsX: return zero();
    case Kind::Exp: return scale(x->coeff.derivative("b"), prod({abs_x(1), x}));
    case Kind::Func: {
      const Expr& u = x->children[0];
      if (!contains_symbol(u, "b")) return zero();
      const Expr du = deriv_b(u);
      if (x->name == "sin") return prod({func("cos", u), du});
      if (x->name == "cos") return scale(Scalar::number(-1), prod({func("sin", u), du}));
      if (x->name == "exp") return prod({x, du});
      return std::nullopt;
    }
    case Kind::Scale:
      return sum({scalar(Scalar{}), scale(x->coeff.derivative("b"), x->children[0]),
                  scale(x->coeff, deriv_b(x->children[0]))});
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : x->children) terms.push_back(deriv_b(t));
      return sum(std::move(terms));
    }
    case Kind::Prod: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < x->children.size(); ++i) {
        auto fs = x->children;
        fs[i] = deriv_b(fs[i]);
        terms.push_back(prod(std::move(fs)));
      }
      return sum(std::move(terms));
    }
    case Kind::Lap: return lap(deriv_b(x->children[0]));
    default: return std::nullopt;
  }
}

std::optional<Expr> distribute(const Expr& n) {
  if (n->kind != Kind::Prod) return std::nullopt;
  const auto& fs = n->children;
  const std::size_t s = index_of(fs, Kind::Sum);
  if (s == fs.size()) return std::nullopt;
  std::vector<Expr> terms;
  for (const auto& t : fs[s]->children) {
    auto parts = fs;
    parts[s] = t;
    terms.push_back(prod(std::move(parts)));
  }
  return sum(std::move(terms));
}

std::optional<Expr> try_rule(Rule r, const Expr& n, const Node* parent, const ReduceOptions& o) {
  switch (r) {
    case Rule::Scaling: return scaling(n, o);
    case Rule::Triviality: return triviality(n, parent);
    case Rule::ProductExp: return product_exp(n);
    case Rule::YukawaLaplacian: return yukawa_laplacian(n);
    case Rule::HellmannFeynman: return hellmann_feynman(n);
    case Rule::Absorb: return absorb(n);
    case Rule::Sift: return sift(n);
    case Rule::LapLinearity: return lap_linearity(n);
    case Rule::DiffB: return diff_b(n);
    case Rule::Distribute: return distribute(n);
  }
  return std::nullopt;
}

using Visitor = std::function<bool(const Expr&, const Node*, const std::vector<std::size_t>&)>;

/// Pre-order walk; stops early when visit returns true.
bool walk(const Expr& e, const Node* parent, std::vector<std::size_t>& path, const Visitor& visit) {
  if (visit(e, parent, path)) return true;
  for (std::size_t i = 0; i < e->children.size(); ++i) {
    path.push_back(i);
    const bool stop = walk(e->children[i], e.get(), path, visit);
    path.pop_back();
    if (stop) return true;
  }
  return false;
}

std::optional<Redex> first_redex(const Expr& e, const ReduceOptions& opts) {
  for (Rule r : opts.priority) {
    std::optional<Redex> found;
    std::vector<std::size_t> path;
    walk(e, nullptr, path, [&](const Expr& n, const Node* parent, const auto& p) {
      if (auto out = try_rule(r, n, parent, opts)) {
        found = Redex{r, p, *out};
        return true;
      }
      return false;
    });
    if (found) return found;
  }
  return std::nullopt;
}

Expr replace_at(const Expr& node, const std::vector<std::size_t>& path, std::size_t depth,
                const Expr& repl) {
  if (depth == path.size()) return repl;
  auto children = node->children;
  children.at(path[depth]) = replace_at(children[path[depth]], path, depth + 1, repl);
  return rebuild(*node, std::move(children));
}

Expr subterm(const Expr& root, const std::vector<std::size_t>& path) {
  Expr n = root;
  for (std::size_t i : path) n = n->children.at(i);
  return n;
}

void collect(const Expr& e, const Scalar& c, Scalar& delta_coeff,
             std::map<std::pair<std::string, int>, KernelTerm>& kernels,
             std::vector<Expr>& unresolved) {
  const auto add_kernel = [&](const Scalar& ec, int p) {
    auto [it, inserted] = kernels.try_emplace({ec.to_string(), p}, KernelTerm{c, ec, p});
    if (!inserted) it->second.coeff = it->second.coeff + c;
  };
  switch (e->kind) {
    case Kind::Sum:
      for (const auto& t : e->children) collect(t, c, delta_coeff, kernels, unresolved);
      return;
    case Kind::Scale: collect(e->children[0], c * e->coeff, delta_coeff, kernels, unresolved); return;
    case Kind::Scalar:
      if (!e->coeff.is_zero()) {
        const Scalar cc = c * e->coeff;
        auto [it, inserted] = kernels.try_emplace({"0", 0}, KernelTerm{cc, Scalar{}, 0});
        if (!inserted) it->second.coeff = it->second.coeff + cc;
      }
      return;
    case Kind::Delta: delta_coeff = delta_coeff + c; return;
    case Kind::AbsX: add_kernel(Scalar{}, e->power); return;
    case Kind::Exp: add_kernel(e->coeff, 0); return;
    case Kind::Prod:
      if (is_yukawa(e) || (e->children.size() == 2 && e->children[0]->kind == Kind::Exp &&
                           e->children[1]->kind == Kind::AbsX)) {
        add_kernel(e->children[0]->coeff, e->children[1]->power);
        return;
      }
      break;
    default: break;
  }
  unresolved.push_back(scale(c, e));
}

}  // namespace

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Scaling: return "R1-scaling";
    case Rule::Triviality: return "R2-triviality";
    case Rule::ProductExp: return "R3-product";
    case Rule::YukawaLaplacian: return "R4-yukawa-laplacian";
    case Rule::HellmannFeynman: return "R5-hellmann-feynman";
    case Rule::Absorb: return "R6-absorb";
    case Rule::Sift: return "sift";
    case Rule::LapLinearity: return "lap-linearity";
    case Rule::DiffB: return "db-leibniz";
    case Rule::Distribute: return "distribute";
  }
  return "?";
}

std::vector<Rule> default_priority() {
  return {Rule::YukawaLaplacian, Rule::HellmannFeynman, Rule::Scaling,
          Rule::ProductExp,      Rule::Absorb,          Rule::Triviality,
          Rule::Sift,            Rule::LapLinearity,    Rule::DiffB,
          Rule::Distribute};
}

std::string format_step(const TraceStep& s) {
  return std::string(rule_name(s.rule)) + ": " + print(s.before) + " ⇒ " + print(s.after);
}

bool is_smooth(const Expr& f) {
  switch (f->kind) {
    case Kind::Scalar: return true;
    case Kind::AbsX: return f->power > 0 && f->power % 2 == 0;
    case Kind::Func:
      return (f->name == "sin" || f->name == "cos" || f->name == "exp") &&
             is_even_polynomial(f->children[0]);
    case Kind::Scale:
    case Kind::Sum:
    case Kind::Prod: return std::all_of(f->children.begin(), f->children.end(), is_smooth);
    default: return false;
  }
}

std::optional<Scalar> value_at_zero(const Expr& f) {
  switch (f->kind) {
    case Kind::Scalar: return f->coeff;
    case Kind::AbsX:
      if (f->power > 0) return Scalar{};
      return std::nullopt;
    case Kind::Exp: return Scalar::number(1);
    case Kind::Func: {
      const auto a = value_at_zero(f->children[0]);
      if (!a || !a->is_zero()) return std::nullopt;
      if (f->name == "sin") return Scalar{};
      if (f->name == "cos" || f->name == "exp") return Scalar::number(1);
      return std::nullopt;
    }
    case Kind::Scale: {
      const auto v = value_at_zero(f->children[0]);
      if (!v) return std::nullopt;
      return f->coeff * *v;
    }
    case Kind::Sum: {
      Scalar total;
      for (const auto& t : f->children) {
        const auto v = value_at_zero(t);
        if (!v) return std::nullopt;
        total = total + *v;
      }
      return total;
    }
    case Kind::Prod: return product_at_zero(f->children);
    default: return std::nullopt;
  }
}

std::vector<Redex> all_redexes(const Expr& e, const ReduceOptions& opts) {
  std::vector<Redex> out;
  std::vector<std::size_t> path;
  walk(e, nullptr, path, [&](const Expr& n, const Node* parent, const auto& p) {
    for (Rule r : opts.priority)
      if (auto rep = try_rule(r, n, parent, opts)) out.push_back({r, p, *rep});
    return false;
  });
  return out;
}

Expr apply_redex(const Expr& root, const Redex& r) { return replace_at(root, r.path, 0, r.replacement); }

Reduction reduce(const Expr& e, const ReduceOptions& opts) {
  Reduction out;
  Expr cur = e;
  while (auto rx = first_redex(cur, opts)) {
    if (static_cast<int>(out.trace.size()) >= opts.max_steps)
      throw Error("reduce: no normal form within " + std::to_string(opts.max_steps) + " steps");
    out.trace.push_back({rx->rule, subterm(cur, rx->path), rx->replacement});
    cur = apply_redex(cur, *rx);
  }
  out.normal_form = cur;
  out.form = canonicalize(cur);
  return out;
}

std::set<std::string> reachable_normal_forms(const Expr& e, const ReduceOptions& opts,
                                             std::size_t state_limit) {
  std::set<std::string> forms;
  std::set<std::string> seen;
  std::vector<Expr> stack{e};
  while (!stack.empty()) {
    Expr cur = stack.back();
    stack.pop_back();
    if (!seen.insert(print(cur)).second) continue;
    if (seen.size() > state_limit) throw Error("reachable_normal_forms: state limit exceeded");
    const auto redexes = all_redexes(cur, opts);
    if (redexes.empty()) {
      forms.insert(canonicalize(cur).to_string());
      continue;
    }
    for (const auto& r : redexes) stack.push_back(apply_redex(cur, r));
  }
  return forms;
}

CanonicalForm canonicalize(const Expr& normal_form) {
  CanonicalForm f;
  Expr body = normal_form;
  if (body->kind == Kind::Bracket) {
    f.test_function = body->name;
    body = body->children[0];
  }
  std::map<std::pair<std::string, int>, KernelTerm> kernels;
  collect(body, Scalar::number(1), f.delta_coeff, kernels, f.unresolved);
  for (auto& [key, k] : kernels)
    if (!k.coeff.is_zero()) f.kernel_terms.push_back(k);
  return f;
}

Expr CanonicalForm::to_expr() const {
  std::vector<Expr> terms{scale(delta_coeff, delta())};
  for (const auto& k : kernel_terms)
    terms.push_back(scale(k.coeff, prod({exp_abs(k.exp_coeff), abs_x(k.power)})));
  terms.insert(terms.end(), unresolved.begin(), unresolved.end());
  Expr body = sum(std::move(terms));
  return test_function ? bracket(body, *test_function) : body;
}

std::string CanonicalForm::to_string() const { return print(to_expr()); }

bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
  return a.to_string() == b.to_string() && a.complete() == b.complete();
}

}  // namespace cspec::rewrite
