#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>

#include "cspec/rewrite/parser.hpp"
#include "cspec/rewrite/reduce.hpp"
#include "cspec/rewrite/verify.hpp"
#include "cspec/testfn.hpp"

using namespace cspec;
using namespace cspec::rewrite;

namespace {

Scalar sym(const char* s) { return Scalar::symbol(s); }
Scalar num(long long p, long long q = 1) { return Scalar::number(Rational(p, q)); }

Scalar scalar_of(const std::string& text) {
  const Expr e = parse(text);
  REQUIRE(e->kind == Kind::Scalar);
  return e->coeff;
}

std::vector<Rule> with_head(const std::vector<Rule>& head) {
  std::vector<Rule> order = head;
  for (Rule r : default_priority())
    if (std::find(order.begin(), order.end(), r) == order.end()) order.push_back(r);
  return order;
}

Bindings bindings() { return {{"hbar", 1.3}, {"m", 0.7}, {"alpha", -0.9}, {"b", 1.1}, {"E", -0.4}}; }

Expr random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 4);
  const char* syms[] = {"b", "hbar", "m", "alpha"};
  switch (pick(rng)) {
    case 0: return delta();
    case 1: return delta_over_abs_x();
    case 2: {
      const int p = static_cast<int>(rng() % 4) - 1;
      return abs_x(p == 0 ? 2 : p);
    }
    case 3: return exp_abs(-sym(syms[rng() % 4]));
    case 4: return scalar(num(static_cast<long long>(rng() % 7) + 1, 2) * sym(syms[rng() % 4]));
    case 5: return lap(random_expr(rng, depth - 1));
    case 6: return deriv_b(random_expr(rng, depth - 1));
    case 7: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 8: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    default: return scale(num(-3, 4), random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parser grammar mapping") {
  const Expr a = parse("delta/|x| * exp(-b*|x|)");
  REQUIRE(a->kind == Kind::Prod);
  REQUIRE(a->children.size() == 2);
  CHECK(a->children[0]->kind == Kind::DeltaOverAbsX);
  CHECK(a->children[1]->kind == Kind::Exp);
  CHECK(a->children[1]->coeff == -sym("b"));

  const Expr l = parse("lap(exp(-b*|x|)/|x|)");
  REQUIRE(l->kind == Kind::Lap);
  const Expr& in = l->children[0];
  REQUIRE(in->kind == Kind::Prod);
  CHECK(in->children[0]->kind == Kind::Exp);
  CHECK(in->children[1]->kind == Kind::AbsX);
  CHECK(in->children[1]->power == -1);
}

TEST_CASE("parser is whitespace-insensitive and records spans") {
  CHECK(print(parse("delta/|x|*exp(-b*|x|)")) == print(parse("  delta / |x|  *  exp( - b * |x| ) ")));
  const Expr e = parse("lap(delta)");
  CHECK(e->span.begin == 1);
  CHECK(e->span.end == 11);
}

TEST_CASE("syntax errors report the column") {
  try {
    parse("delta/|x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 9);
    CHECK(std::find(e.expected().begin(), e.expected().end(), "'|'") != e.expected().end());
  }
  CHECK_THROWS_AS(parse("delta |x|"), ParseError);
  CHECK_THROWS_AS(parse("lap(delta"), ParseError);
  CHECK_THROWS_AS(parse("q*delta"), ParseError);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("1/delta"), ParseError);
}

TEST_CASE("exact decimal literals") {
  CHECK(scalar_of("0.25") == num(1, 4));
  CHECK(scalar_of("1.5e-1") == num(3, 20));
  CHECK(scalar_of("2/4") == num(1, 2));
}

TEST_CASE("scalar normal form") {
  CHECK(scalar_of("b*hbar") == scalar_of("hbar*b"));
  CHECK(scalar_of("sqrt(b/(2*pi))^2") == scalar_of("b/(2*pi)"));
  CHECK(scalar_of("(b+1)*(b-1)") == scalar_of("b^2 - 1"));
  CHECK(scalar_of("sqrt(8)") == scalar_of("2*sqrt(2)"));
  CHECK((sym("b") - sym("b")).is_zero());
  CHECK(scalar_of("b^3").derivative("b") == scalar_of("3*b^2"));
  CHECK(scalar_of("sqrt(b)").derivative("b") == scalar_of("1/(2*sqrt(b))"));
  CHECK(scalar_of("alpha*b + 2").evaluate({{"alpha", 3.0}, {"b", 0.5}}) == doctest::Approx(3.5));
  CHECK_THROWS_AS(scalar_of("b").evaluate({}), Error);
}

TEST_CASE("factories normalize silently") {
  CHECK(print(prod({abs_x(2), delta(), abs_x(-1)})) == print(prod({delta(), abs_x(1)})));
  CHECK(print(prod({delta(), abs_x(-1)})) == print(delta_over_abs_x()));
  CHECK(print(prod({exp_abs(sym("b")), exp_abs(-sym("b"))})) == "1");
  CHECK(print(prod({abs_x(2), abs_x(-2)})) == "1");
  CHECK(print(lap(scalar(sym("b")))) == "0");
  CHECK(print(sum({delta(), scale(num(-1), delta())})) == "0");
}

TEST_CASE("print/parse round-trip on the corpus and its reductions") {
  for (const auto& text : regression_corpus()) {
    const Expr e = parse(text);
    CAPTURE(text);
    CHECK(print(parse(print(e))) == print(e));
    const auto red = reduce(e);
    CHECK(print(parse(print(red.normal_form))) == print(red.normal_form));
    const Expr canon = red.form.to_expr();
    CHECK(print(parse(print(canon))) == print(canon));
    CHECK(canonicalize(parse(red.form.to_string())) == red.form);
  }
}

TEST_CASE("print/parse round-trip on random trees") {
  std::mt19937 rng(5);
  for (int i = 0; i < 400; ++i) {
    const Expr e = random_expr(rng, 3);
    CAPTURE(print(e));
    CHECK(print(parse(print(e))) == print(e));
  }
}

TEST_CASE("R1 scaling") {
  const auto r = reduce(parse("(|x|^2/(2*3))*lap(delta)"));
  CHECK(r.form.to_string() == "delta");
  REQUIRE(!r.trace.empty());
  CHECK(r.trace[0].rule == Rule::Scaling);
  ReduceOptions d2;
  d2.dimension = 2;
  CHECK(reduce(parse("(|x|^2/4)*lap(delta)"), d2).form.to_string() == "delta");
  CHECK(reduce(parse("(|x|^2/4)*lap(delta)")).form.to_string() == "3/2*delta");
}

TEST_CASE("R2 triviality") {
  for (const char* t : {"delta/|x|", "delta/|x| * (1+|x|^2)", "delta/|x| * cos(|x|^2)",
                        "delta/|x| * |x|^2", "b*delta/|x|"}) {
    CAPTURE(t);
    const auto r = reduce(parse(t));
    CHECK(r.form.to_string() == "0");
    CHECK(r.form.complete());
  }
  const auto r = reduce(parse("delta/|x| * (1+|x|^2)"));
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].rule == Rule::Triviality);
}

TEST_CASE("R3 product with an exponential") {
  const auto r = reduce(parse("delta/|x| * exp(-b*|x|)"));
  CHECK(r.form.delta_coeff == -sym("b"));
  CHECK(r.form.kernel_terms.empty());
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].rule == Rule::ProductExp);
  CHECK(format_step(r.trace[0]) == "R3-product: delta/|x|*exp(-b*|x|) ⇒ -b*delta");
  CHECK(reduce(parse("2*delta/|x|*exp(-2*b*|x|)")).form.delta_coeff == num(-4) * sym("b"));
  CHECK(reduce(parse("delta/|x|*exp(b*|x|)*cos(|x|^2)")).form.delta_coeff == sym("b"));
}

TEST_CASE("R4 Yukawa Laplacian") {
  const auto r = reduce(parse("lap(exp(-b*|x|)/|x|)"));
  CHECK(r.form.to_string() == "-4*pi*delta + b^2*exp(-b*|x|)/|x|");
  CHECK(r.trace[0].rule == Rule::YukawaLaplacian);
  CHECK(reduce(parse("lap(1/|x|)")).form.to_string() == "-4*pi*delta");
}

TEST_CASE("R5 Hellmann-Feynman") {
  const auto r = reduce(parse("d/db(delta/|x|*exp(-b*|x|))"));
  CHECK(r.form.to_string() == "-delta");
  CHECK(r.trace[0].rule == Rule::HellmannFeynman);
  CHECK(reduce(parse("d/db(b*delta/|x|*exp(-b*|x|))")).form.delta_coeff == num(-2) * sym("b"));
  CHECK(reduce(parse("d/db(delta/|x|*exp(-b^2*|x|))")).form.delta_coeff == num(-2) * sym("b"));
}

TEST_CASE("R6 absorb") {
  const auto r = reduce(parse("delta/|x| * |x|"));
  CHECK(r.form.to_string() == "delta");
  CHECK(r.trace[0].rule == Rule::Absorb);
  CHECK(reduce(parse("delta/|x|*exp(-b*|x|)*|x|")).form.to_string() == "delta");
}

TEST_CASE("H psi reduces to the vanishing-condition coefficient") {
  const auto r = reduce(parse(hpsi_expression()));
  REQUIRE(r.form.complete());
  CHECK(r.form.delta_coeff == scalar_of("sqrt(b/(2*pi))*(4*pi*hbar^2/(2*m) + alpha*b)"));
  REQUIRE(r.form.kernel_terms.size() == 1);
  const auto& k = r.form.kernel_terms[0];
  CHECK(k.coeff == scalar_of("-(hbar^2*b^2/(2*m))*sqrt(b/(2*pi))"));
  CHECK(k.exp_coeff == -sym("b"));
  CHECK(k.power == -1);
}

TEST_CASE("incomplete reductions carry the partial form") {
  const auto s = reduce(parse("delta/|x| * sin(|x|)"));
  CHECK(!s.form.complete());
  REQUIRE(s.form.unresolved.size() == 1);
  CHECK(print(s.form.unresolved[0]) == "delta/|x|*sin(|x|)");
  CHECK(!reduce(parse("delta*delta")).form.complete());
  const auto mixed = reduce(parse("delta + delta/|x|*sin(|x|)"));
  CHECK(!mixed.form.complete());
  CHECK(mixed.form.delta_coeff == num(1));
}

TEST_CASE("sift and linearity") {
  CHECK(reduce(parse("delta*exp(-b*|x|)")).form.to_string() == "delta");
  CHECK(reduce(parse("delta*cos(|x|^2)")).form.to_string() == "delta");
  CHECK(reduce(parse("delta*|x|")).form.to_string() == "0");
  CHECK(reduce(parse("lap(2*exp(-b*|x|)/|x| + 1/|x|)")).form.delta_coeff == scalar_of("-12*pi"));
  CHECK(!reduce(parse("delta/|x|^2")).form.complete());
}

TEST_CASE("smoothness classification") {
  CHECK(is_smooth(parse("1 + |x|^2")));
  CHECK(is_smooth(parse("cos(|x|^2)")));
  CHECK(!is_smooth(parse("exp(-b*|x|)")));
  CHECK(!is_smooth(parse("|x|")));
  CHECK(!is_smooth(parse("sin(|x|)")));
  REQUIRE(value_at_zero(parse("exp(-b*|x|)")));
  CHECK(*value_at_zero(parse("exp(-b*|x|)")) == num(1));
  CHECK(!value_at_zero(parse("1/|x|")));
}

TEST_CASE("confluence under permutations of R1-R6") {
  std::vector<Rule> head = {Rule::Scaling, Rule::Triviality, Rule::ProductExp,
                            Rule::YukawaLaplacian, Rule::HellmannFeynman, Rule::Absorb};
  std::sort(head.begin(), head.end());
  int checked = 0;
  for (const auto& text : regression_corpus()) {
    const Expr e = parse(text);
    if (node_count(e) > 8) continue;
    ++checked;
    const std::string ref = reduce(e).form.to_string();
    std::vector<Rule> p = head;
    do {
      ReduceOptions o;
      o.priority = with_head(p);
      CHECK(reduce(e, o).form.to_string() == ref);
    } while (std::next_permutation(p.begin(), p.end()));
    CAPTURE(text);
    CHECK(reachable_normal_forms(e).size() == 1);
  }
  CHECK(checked >= 12);
}

TEST_CASE("confluence under random full orders") {
  std::mt19937 rng(17);
  for (const auto& text : regression_corpus()) {
    const Expr e = parse(text);
    const std::string ref = reduce(e).form.to_string();
    for (int i = 0; i < 30; ++i) {
      ReduceOptions o;
      std::shuffle(o.priority.begin(), o.priority.end(), rng);
      CAPTURE(text);
      CHECK(reduce(e, o).form.to_string() == ref);
    }
  }
}

TEST_CASE("termination within ten steps per input node") {
  std::mt19937 rng(23);
  std::vector<Expr> inputs;
  for (const auto& text : regression_corpus()) inputs.push_back(parse(text));
  for (int i = 0; i < 300; ++i) inputs.push_back(random_expr(rng, 3));
  for (const auto& e : inputs) {
    const auto r = reduce(e);
    CAPTURE(print(e));
    CHECK(r.trace.size() <= static_cast<std::size_t>(10 * node_count(e)));
  }
}

static int over_abs_x_count(const Expr& e) {
  int n = e->kind == Kind::DeltaOverAbsX;
  for (const auto& c : e->children) n += over_abs_x_count(c);
  return n;
}

TEST_CASE("every redex strictly decreases (delta/|x| count, singular count, node count)") {
  for (const auto& text : regression_corpus()) {
    const Expr e = parse(text);
    for (const auto& rx : all_redexes(e)) {
      CAPTURE(text);
      CAPTURE(rule_name(rx.rule));
      const Expr next = apply_redex(e, rx);
      const auto before = std::tuple(over_abs_x_count(e), singular_count(e), node_count(e));
      const auto after = std::tuple(over_abs_x_count(next), singular_count(next), node_count(next));
      // Distribution and linearity may copy subterms; the measure is the
      // number of steps left, which the termination test bounds.
      if (rx.rule != Rule::Distribute && rx.rule != Rule::LapLinearity && rx.rule != Rule::DiffB &&
          rx.rule != Rule::YukawaLaplacian)
        CHECK(after < before);
    }
  }
}

TEST_CASE("soundness on the corpus") {
  const auto bind = bindings();
  for (const auto& phi : {testfn::bump_new({0, 0, 0}, 1.0), testfn::bump_new({0.1, -0.2, 0.15}, 1.3)}) {
    for (const auto& text : regression_corpus()) {
      CAPTURE(text);
      const auto v = verify_reduction(parse(text), phi, bind);
      CHECK(v.gap <= v.tolerance);
    }
  }
}

TEST_CASE("verify_reduction examples") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  const auto a = verify_reduction(parse("delta/|x|*exp(-b*|x|)"), phi, {{"b", 1.0}});
  CHECK(a.lhs == doctest::Approx(-1.0).epsilon(2e-4));
  CHECK(a.rhs == -1.0);
  CHECK(a.gap <= 2e-4);
  const auto y = verify_reduction(parse("lap(exp(-b*|x|)/|x|)"), phi, {{"b", 2.0}});
  CHECK(y.gap <= 1e-5);
  const auto d = verify_reduction(parse("delta"), phi, {});
  CHECK(d.gap == 0.0);
}

TEST_CASE("numeric bracket refuses unsupported shapes") {
  const auto phi = testfn::bump_new({0, 0, 0}, 1.0);
  CHECK_THROWS_AS(numeric_bracket(parse("delta*delta"), phi, {}), InvalidParameter);
  CHECK_THROWS_AS(numeric_bracket(parse("b*delta"), phi, {}), Error);
  CHECK_THROWS_AS(canonical_bracket(reduce(parse("delta/|x|*sin(|x|)")).form, phi, {}), Error);
}
