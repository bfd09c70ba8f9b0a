#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlpde/config.hpp"
#include "nlpde/kernel.hpp"
#include "nlpde/regularity.hpp"
#include "nlpde/scheme.hpp"
#include "nlpde/solver.hpp"

namespace nlpde {

/// Runtime numerical failure (solver breakdown, non-convergent tails). The
/// CLI maps it to exit code 3; a partial report is still emitted.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Warning text when sigma+alpha sits within 0.05 of an integer, empty
/// otherwise.
std::string near_integer_warning(double sigma, double alpha);

/// A parsed, validated experiment: kernel, problem, solver resolution, and
/// the analyses to run.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = "out";

  CauchyExteriorProblem problem;
  SolveOptions solve_opts;

  bool certify = true;
  int certify_budget = 2000;

  bool scheme_enabled = false;
  SchemeConfig scheme;

  bool analyze_pointwise = false;
  double pointwise_r_max = 0.5;
  int pointwise_count = 6;
  std::vector<int> time_orders;
  double times_max = 0.128;
  int times_count = 5;
  bool uniform_norm = false;
  double uniform_window = 0.5;
  bool exact_mode_check = false;

  bool emit_solution_csv = false;
  bool emit_operator_csv = false;
  bool emit_snapshot = false;

  std::vector<std::string> warnings;
  std::string config_text;

  static ExperimentConfig from_tree(const ConfigTree& tree);
  static ExperimentConfig from_file(const std::string& path);
};

struct RunReport {
  std::string json_text;
  int exit_code = 0;  // 0 ok, 3 numerical failure with partial report
  std::vector<std::string> emitted_files;
};

/// certify -> solve -> scheme -> regularity as requested; deterministic for a
/// fixed seed (volatile data lives under the report's "timestamps" object).
/// Writes report.json and the data CSVs under cfg.out_dir.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SuiteRow {
  std::string name;
  double measured = 0.0;
  double lo = 0.0;  // acceptance interval [lo, hi]
  double hi = 0.0;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<SuiteRow> rows;
  bool all_pass() const;
  std::string table() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir;  // empty: no file emission
  bool quick = false;   // reduced resolution (plumbing tests, not acceptance)
};

/// Named verification suites: "certify" (built-in kernels pass their declared
/// classes), "convergence" (operator oracle and consistency slopes),
/// "schauder" (solver oracle, degenerate exactness, decay rate, pointwise and
/// time exponents), "sigma-sweep" (stability of the constants toward the
/// second-order limit). Unknown names throw ConfigError.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opts);

/// The exact cosine-mode value of the pure power operator in 1d:
/// L cos(xi .)(x) = -4 (2-sigma) lambda xi^sigma I(sigma) cos(xi x).
double exact_power_cosine_value(double sigma, double lambda, double xi);

}  // namespace nlpde
