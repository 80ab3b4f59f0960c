#include "cspec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cspec/error.hpp"
#include "cspec/lloc.hpp"
#include "cspec/rewrite/parser.hpp"
#include "cspec/rewrite/verify.hpp"
#include "cspec/spectral.hpp"
#include "cspec/testfn.hpp"

namespace cspec::cli {

using json = nlohmann::ordered_json;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::stod(format_number(x));
}

namespace {

enum class Format { Text, Json, Csv };

struct Config {
  double hbar = 1.0;
  double mass = 1.0;
  double alpha = -1.0;
  std::optional<double> b;
  std::optional<double> energy;
  std::optional<double> tol;
  std::vector<double> radii;
  std::vector<double> cutoffs = {1e2, 1e3, 1e4};
  std::vector<double> center = {0.0, 0.0, 0.0};
  double support = 1.0;
  double db = 1e-3;
  bool json = false;
  bool csv = false;
  std::string out_path;
  std::string expression;

  Format format() const { return json ? Format::Json : csv ? Format::Csv : Format::Text; }
};

/// Report text plus exit code; written once by run().
struct Outcome {
  int code = kSuccess;
  std::string text;
};

std::string dump(const json& j) { return j.dump() + "\n"; }

dist::PairingConfig pairing(const Config& c) {
  dist::PairingConfig p;
  if (!c.radii.empty()) {
    if (c.radii.size() < 4)
      throw InvalidParameter("--radii needs at least 4 radii for the pole fit");
    p.radii = c.radii;
  }
  return p;
}

testfn::TestFunction test_function(const Config& c) {
  if (c.center.size() != 3) throw InvalidParameter("--center takes three comma-separated values");
  return testfn::bump_new({c.center[0], c.center[1], c.center[2]}, c.support);
}

spectral::PhysParams params(const Config& c) { return {c.hbar, c.mass, c.alpha}; }

Outcome cmd_spectrum(const Config& c) {
  const auto p = params(c);
  const auto r = spectral::c_spectrum(p);
  Outcome o;
  if (c.format() == Format::Json) {
    json j;
    j["hbar"] = round12(c.hbar);
    j["mass"] = round12(c.mass);
    j["alpha"] = round12(c.alpha);
    j["b"] = round12(r.b);
    j["energy"] = round12(r.energy);
    j["sign_consistent"] = r.sign_consistent;
    if (r.aghh_energy) j["aghh_energy"] = round12(*r.aghh_energy);
    o.text = dump(j);
  } else {
    std::ostringstream os;
    os << "hbar = " << format_number(c.hbar) << "\nmass = " << format_number(c.mass)
       << "\nalpha = " << format_number(c.alpha) << "\nb = " << format_number(r.b)
       << "\nenergy = " << format_number(r.energy)
       << "\nsign_consistent = " << (r.sign_consistent ? "true" : "false") << "\n";
    if (r.aghh_energy) os << "aghh_energy = " << format_number(*r.aghh_energy) << "\n";
    o.text = os.str();
  }
  return o;
}

Outcome cmd_reduce(const Config& c) {
  const auto e = rewrite::parse(c.expression);
  const auto red = rewrite::reduce(e);
  const auto& f = red.form;
  Outcome o;
  o.code = f.complete() ? kSuccess : kReductionIncomplete;
  if (c.format() == Format::Json) {
    json j;
    j["input"] = rewrite::print(e);
    j["canonical"] = f.to_string();
    j["complete"] = f.complete();
    j["delta_coeff"] = f.delta_coeff.to_string();
    j["kernel_terms"] = json::array();
    for (const auto& k : f.kernel_terms) {
      json t;
      t["coeff"] = k.coeff.to_string();
      t["kernel"] = rewrite::print(rewrite::prod({rewrite::exp_abs(k.exp_coeff), rewrite::abs_x(k.power)}));
      j["kernel_terms"].push_back(t);
    }
    j["unresolved"] = json::array();
    for (const auto& u : f.unresolved) j["unresolved"].push_back(rewrite::print(u));
    j["trace"] = json::array();
    for (const auto& s : red.trace)
      j["trace"].push_back(
          {{"rule", rewrite::rule_name(s.rule)}, {"before", rewrite::print(s.before)},
           {"after", rewrite::print(s.after)}});
    o.text = dump(j);
  } else {
    std::ostringstream os;
    os << f.to_string() << "\n";
    for (const auto& s : red.trace) os << "  " << rewrite::format_step(s) << "\n";
    for (const auto& u : f.unresolved) os << "unresolved: " << rewrite::print(u) << "\n";
    o.text = os.str();
  }
  return o;
}

rewrite::Bindings bindings(const Config& c) {
  const double b = c.b.value_or(1.0);
  const double energy = c.energy.value_or(-c.hbar * c.hbar * b * b / (2.0 * c.mass));
  return {{"hbar", c.hbar}, {"m", c.mass}, {"alpha", c.alpha}, {"b", b}, {"E", energy}};
}

Outcome cmd_bracket(const Config& c) {
  const auto e = rewrite::parse(c.expression);
  const auto phi = test_function(c);
  const auto bind = bindings(c);
  const auto r = rewrite::numeric_bracket(e, phi, bind, pairing(c));
  Outcome o;
  if (c.format() == Format::Json) {
    json j;
    j["expression"] = rewrite::print(e);
    j["value"] = round12(r.value);
    j["error_estimate"] = round12(r.error_estimate);
    j["method"] = dist::to_string(r.method);
    if (r.fit) {
      j["pole_coeff"] = round12(r.fit->pole_coeff);
      j["rms_residual"] = round12(r.fit->rms_residual);
    }
    o.text = dump(j);
  } else {
    o.text = "value = " + format_number(r.value) + "\nerror_estimate = " +
             format_number(r.error_estimate) + "\nmethod = " + dist::to_string(r.method) + "\n";
  }
  return o;
}

Outcome cmd_verify(const Config& c) {
  SuiteOptions opts;
  opts.tolerance = c.tol;
  opts.pairing = pairing(c);
  const auto checks = run_verify_suite(opts);
  const bool all = std::all_of(checks.begin(), checks.end(), [](const Check& k) { return k.pass; });
  Outcome o;
  o.code = all ? kSuccess : kVerificationFailure;
  if (c.format() == Format::Json) {
    json j;
    j["pass"] = all;
    j["checks"] = json::array();
    for (const auto& k : checks) {
      json row;
      row["name"] = k.name;
      row["pass"] = k.pass;
      row["measured"] = std::isfinite(k.measured) ? json(round12(k.measured)) : json(nullptr);
      row["tolerance"] = round12(k.tolerance);
      if (!k.detail.empty()) row["detail"] = k.detail;
      j["checks"].push_back(row);
    }
    o.text = dump(j);
  } else if (c.format() == Format::Csv) {
    std::ostringstream os;
    os << "name,pass,measured,tolerance\n";
    for (const auto& k : checks)
      os << '"' << k.name << "\"," << (k.pass ? "true" : "false") << ","
         << format_number(k.measured) << "," << format_number(k.tolerance) << "\n";
    o.text = os.str();
  } else {
    std::ostringstream os;
    std::size_t passed = 0;
    for (const auto& k : checks) {
      passed += k.pass;
      os << (k.pass ? "PASS " : "FAIL ") << k.name << "  gap=" << format_number(k.measured)
         << " tol=" << format_number(k.tolerance);
      if (!k.detail.empty()) os << "  (" << k.detail << ")";
      os << "\n";
    }
    os << passed << "/" << checks.size() << " checks passed\n";
    o.text = os.str();
  }
  return o;
}

Outcome cmd_green_check(const Config& c) {
  const auto p = params(c);
  const double energy = c.energy.value_or(-0.5);
  const double tol = c.tol.value_or(1e-6);
  const auto phi = test_function(c);
  const double res = spectral::green_residual(p, energy, phi, pairing(c));
  Outcome o;
  o.code = res <= tol ? kSuccess : kVerificationFailure;
  if (c.format() == Format::Json) {
    json j;
    j["energy"] = round12(energy);
    j["b"] = round12(p.decay_rate(energy));
    j["prefactor"] = round12(spectral::green_prefactor(p));
    j["residual"] = round12(res);
    j["tolerance"] = round12(tol);
    j["pass"] = res <= tol;
    o.text = dump(j);
  } else {
    o.text = "b = " + format_number(p.decay_rate(energy)) + "\nprefactor = " +
             format_number(spectral::green_prefactor(p)) + "\nresidual = " + format_number(res) +
             "\npass = " + (res <= tol ? "true" : "false") + "\n";
  }
  return o;
}

Outcome cmd_hf_check(const Config& c) {
  const auto phi = test_function(c);
  const double b = c.b.value_or(1.0);
  const auto hf = spectral::hellmann_feynman_check(b, phi, c.db, pairing(c));
  const double tol = c.tol.value_or(hf.tolerance);
  const double target = -phi.value({0.0, 0.0, 0.0});
  const double dev = std::max({std::abs(hf.analytic - target), std::abs(hf.symbolic - target),
                               std::abs(hf.finite_diff - target)});
  const bool ok = dev <= tol;
  Outcome o;
  o.code = ok ? kSuccess : kVerificationFailure;
  if (c.format() == Format::Json) {
    json j;
    j["b"] = round12(b);
    j["db"] = round12(c.db);
    j["analytic"] = round12(hf.analytic);
    j["symbolic"] = round12(hf.symbolic);
    j["finite_diff"] = round12(hf.finite_diff);
    j["tolerance"] = round12(tol);
    j["pass"] = ok;
    o.text = dump(j);
  } else {
    o.text = "analytic = " + format_number(hf.analytic) + "\nsymbolic = " +
             format_number(hf.symbolic) + "\nfinite_diff = " + format_number(hf.finite_diff) +
             "\npass = " + (ok ? "true" : "false") + "\n";
  }
  return o;
}

json norm_json(const lloc::LocalNorm& n) {
  json j;
  j["radius"] = round12(n.radius);
  j["value"] = n.value ? json(round12(*n.value)) : json(nullptr);
  j["divergent"] = n.divergent();
  return j;
}

std::string norm_text(const lloc::LocalNorm& n) {
  return n.value ? format_number(*n.value) : std::string("divergent");
}

Outcome cmd_bse_demo(const Config& c) {
  const double k_radius = c.support;
  const double eps = 0.2;
  bool ok = true;
  json reports = json::array();
  std::ostringstream os;
  for (const auto& k : lloc::corpus()) {
    const auto rep = lloc::verify_bse(k, k_radius, eps);
    const bool good =
        rep.equivalent && (rep.verdict != lloc::Verdict::LocallyL2 || rep.plateau.sandwich_holds);
    ok = ok && good;
    json j;
    j["kernel"] = rep.kernel_id;
    j["verdict"] = lloc::to_string(rep.verdict);
    j["ball_verdict"] = lloc::to_string(rep.ball_verdict);
    j["plateau_verdict"] = lloc::to_string(rep.plateau_verdict);
    j["equivalent"] = rep.equivalent;
    j["balls"] = json::array();
    for (const auto& b : rep.balls) j["balls"].push_back(norm_json(b));
    j["plateau"] = {{"on_k", norm_json(rep.plateau.on_k)},
                    {"weighted", norm_json(rep.plateau.weighted)},
                    {"outer", norm_json(rep.plateau.outer)},
                    {"sandwich_holds", rep.plateau.sandwich_holds}};
    reports.push_back(j);
    os << rep.kernel_id << ": " << lloc::to_string(rep.verdict)
       << (rep.equivalent ? " (definitions agree)" : " (definitions DISAGREE)")
       << "  int_K|T|^2=" << norm_text(rep.plateau.on_k)
       << " int|phi_K T|^2=" << norm_text(rep.plateau.weighted)
       << " bound=" << norm_text(rep.plateau.outer) << "\n";
  }
  Outcome o;
  o.code = ok ? kSuccess : kVerificationFailure;
  o.text = c.format() == Format::Json
               ? dump(json{{"k_radius", round12(k_radius)}, {"epsilon", eps}, {"reports", reports}})
               : os.str();
  return o;
}

Outcome cmd_cutoff_scan(const Config& c) {
  const auto p = params(c);
  const double energy = c.energy.value_or(-1.0);
  const auto scan = spectral::cutoff_scan(p, energy, c.cutoffs);
  Outcome o;
  if (c.format() == Format::Json) {
    json rows = json::array();
    for (const auto& pt : scan)
      rows.push_back({{"cutoff", round12(pt.cutoff)},
                      {"integral", round12(pt.integral)},
                      {"ratio", round12(pt.ratio())}});
    o.text = dump(json{{"slope", round12(spectral::cutoff_slope(p))}, {"scan", rows}});
  } else {
    std::ostringstream os;
    os << "cutoff,integral,ratio\n";
    for (const auto& pt : scan)
      os << format_number(pt.cutoff) << "," << format_number(pt.integral) << ","
         << format_number(pt.ratio()) << "\n";
    o.text = os.str();
  }
  return o;
}

void physical_options(CLI::App* sub, Config& c) {
  sub->add_option("--hbar", c.hbar, "reduced Planck constant");
  sub->add_option("--mass", c.mass, "particle mass");
  sub->add_option("--alpha", c.alpha, "delta coupling");
}

void output_options(CLI::App* sub, Config& c) {
  auto* j = sub->add_flag("--json", c.json, "JSON output");
  sub->add_flag("--csv", c.csv, "CSV output")->excludes(j);
  sub->add_option("--out", c.out_path, "write the report to a file");
}

void test_function_options(CLI::App* sub, Config& c) {
  sub->add_option("--center", c.center, "bump center x,y,z")->delimiter(',')->expected(3);
  sub->add_option("--support", c.support, "bump support radius");
  sub->add_option("--radii", c.radii, "finite-part radii ladder")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Distribution calculus engine for the delta pseudo-potential"};
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("spectrum", "closed-form C-spectrum");
  physical_options(spectrum, c);
  output_options(spectrum, c);

  auto* reduce = app.add_subcommand("reduce", "reduce an expression to canonical form");
  reduce->add_option("expression", c.expression, "expression text")->required();
  output_options(reduce, c);

  auto* bracket = app.add_subcommand("bracket", "evaluate <expression, phi> numerically");
  bracket->add_option("expression", c.expression, "expression text")->required();
  physical_options(bracket, c);
  bracket->add_option("--b", c.b, "value bound to b");
  bracket->add_option("--energy", c.energy, "value bound to E");
  test_function_options(bracket, c);
  output_options(bracket, c);

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--tol", c.tol, "override every tolerance");
  verify->add_option("--radii", c.radii, "finite-part radii ladder")->delimiter(',');
  output_options(verify, c);

  auto* green = app.add_subcommand("green-check", "weak residual of the Green's function");
  physical_options(green, c);
  green->add_option("--energy", c.energy, "negative energy");
  green->add_option("--tol", c.tol, "residual tolerance");
  test_function_options(green, c);
  output_options(green, c);

  auto* hf = app.add_subcommand("hf-check", "Hellmann-Feynman triple");
  hf->add_option("--b", c.b, "decay rate b");
  hf->add_option("--db", c.db, "central-difference step in (0, 0.1)");
  hf->add_option("--tol", c.tol, "agreement tolerance");
  test_function_options(hf, c);
  output_options(hf, c);

  auto* bse = app.add_subcommand("bse-demo", "local L2 checks on the kernel corpus");
  bse->add_option("--support", c.support, "radius of the compact ball K");
  output_options(bse, c);

  auto* cutoff = app.add_subcommand("cutoff-scan", "naive resolvent diagonal I(L)");
  physical_options(cutoff, c);
  cutoff->add_option("--energy", c.energy, "negative energy");
  cutoff->add_option("--cutoffs", c.cutoffs, "ascending cutoffs")->delimiter(',');
  output_options(cutoff, c);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  Outcome o;
  try {
    if (spectrum->parsed()) o = cmd_spectrum(c);
    else if (reduce->parsed()) o = cmd_reduce(c);
    else if (bracket->parsed()) o = cmd_bracket(c);
    else if (verify->parsed()) o = cmd_verify(c);
    else if (green->parsed()) o = cmd_green_check(c);
    else if (hf->parsed()) o = cmd_hf_check(c);
    else if (bse->parsed()) o = cmd_bse_demo(c);
    else o = cmd_cutoff_scan(c);
  } catch (const rewrite::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kVerificationFailure;
  }

  if (!c.out_path.empty()) {
    std::ofstream f(c.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << c.out_path << "\n";
      return kUsageError;
    }
    f << o.text;
  } else {
    out << o.text;
  }
  return o.code;
}

}  // namespace cspec::cli
