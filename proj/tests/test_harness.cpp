#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "nlpde/harness.hpp"

using namespace nlpde;
using nlohmann::json;

namespace {

std::string config_path(const char* name) {
  return std::string(NLPDE_CONFIG_DIR) + "/" + name;
}

json report_of(const RunReport& rep) { return json::parse(rep.json_text); }

}  // namespace

TEST_CASE("exact cosine values of the power operator") {
  CHECK(exact_power_cosine_value(1.0, 1.0, 1.0) == doctest::Approx(-2.0 * M_PI).epsilon(1e-12));
  // sigma = 0.5: integral constant Gamma(1.5) cos(pi/4) / (0.5 * 0.5)
  const double I = std::tgamma(1.5) * std::cos(M_PI / 4) / 0.25;
  CHECK(exact_power_cosine_value(0.5, 2.0, 1.0) == doctest::Approx(-4.0 * 1.5 * 2.0 * I));
}

TEST_CASE("fracheat config reproduces the exact mode and emits its files") {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path("fracheat.toml"));
  cfg.out_dir = "test_out/fracheat";
  const RunReport rep = run_experiment(cfg);
  REQUIRE(rep.exit_code == 0);
  const json r = report_of(rep);
  CHECK(r["exact_mode_linf_error"].get<double>() <= 1e-2);
  CHECK(r["solver"]["residual_max"].get<double>() <= 1e-9);
  CHECK(r.contains("certification"));
  CHECK(r["time_modulus_j0"]["exponent"].get<double>() == doctest::Approx(1.0).epsilon(0.05));
  for (const auto& f : rep.emitted_files) CHECK(std::filesystem::exists(f));

  // every CSV carries a header row naming columns and units
  for (const auto& f : rep.emitted_files) {
    if (f.size() > 4 && f.substr(f.size() - 4) == ".csv") {
      std::ifstream in(f);
      std::string header;
      std::getline(in, header);
      CHECK(header.find('[') != std::string::npos);
      CHECK(header.find(',') != std::string::npos);
    }
  }
}

TEST_CASE("zero config yields the zero solution and degenerate moduli") {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path("zero.toml"));
  cfg.out_dir = "test_out/zero";
  const RunReport rep = run_experiment(cfg);
  REQUIRE(rep.exit_code == 0);
  const json r = report_of(rep);
  CHECK(r["solver"]["sup_final"].get<double>() == 0.0);
  CHECK(r["pointwise"]["degenerate"].get<bool>());
  CHECK(r["time_modulus_j0"]["degenerate"].get<bool>());
  CHECK(r["time_modulus_j1"]["degenerate"].get<bool>());
}

TEST_CASE("identical config and seed give byte-identical reports modulo timestamps") {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path("fracheat.toml"));
  cfg.out_dir = "test_out/det_a";
  const RunReport a = run_experiment(cfg);
  cfg.out_dir = "test_out/det_b";
  const RunReport b = run_experiment(cfg);
  json ja = report_of(a), jb = report_of(b);
  ja.erase("timestamps");
  jb.erase("timestamps");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("suites are addressable by name and unknown names are config errors") {
  CHECK_THROWS_AS(run_suite("spectra", SuiteOptions{}), ConfigError);
  SuiteOptions o;
  o.quick = true;
  const SuiteResult certify = run_suite("certify", o);
  CHECK(certify.all_pass());
  CHECK(certify.table().find("[PASS]") != std::string::npos);
  const SuiteResult conv = run_suite("convergence", o);
  CHECK(conv.all_pass());
}

TEST_CASE("numerical failures produce a partial report with exit code 3") {
  ExperimentConfig cfg = ExperimentConfig::from_file(config_path("zero.toml"));
  cfg.out_dir = "test_out/fail";
  // a right-hand side that blows up mid-run
  cfg.problem.rhs = [](const Point&, double t) {
    return t > -0.25 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  const RunReport rep = run_experiment(cfg);
  CHECK(rep.exit_code == 3);
  CHECK(report_of(rep).contains("error"));
}
