#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cspec/dist.hpp"

namespace cspec::cli {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kUsageError = 2,
  kReductionIncomplete = 3,
};

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteOptions {
  /// Replaces every numeric tolerance when set.
  std::optional<double> tolerance;
  dist::PairingConfig pairing;
};

/// The invariant suite behind `verify`.
std::vector<Check> run_verify_suite(const SuiteOptions& opts);

/// printf("%.12g") for reports and CSV.
std::string format_number(double x);
/// x rounded to 12 significant digits, for JSON.
double round12(double x);

}  // namespace cspec::cli
