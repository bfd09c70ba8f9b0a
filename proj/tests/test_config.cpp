#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nlpde/config.hpp"
#include "nlpde/harness.hpp"

using namespace nlpde;

TEST_CASE("config tree parses sections, scalars, arrays and comments") {
  const auto t = ConfigTree::parse(R"(
# experiment
seed = 42
[kernel]
form = "holder-modulated"  # with a trailing comment
sigma = 1.3
time_dependent = true
[analysis]
time_orders = [0, 1]
)");
  CHECK(t.get_double("seed", 0) == 42.0);
  CHECK(t.get_string("kernel.form", "") == "holder-modulated");
  CHECK(t.get_double("kernel.sigma", 0) == doctest::Approx(1.3));
  CHECK(t.get_bool("kernel.time_dependent", false));
  CHECK(t.get_double_array("analysis.time_orders") == std::vector<double>{0.0, 1.0});
  CHECK_FALSE(t.has("kernel.alpha"));
}

TEST_CASE("config syntax errors carry line numbers") {
  CHECK_THROWS_AS(ConfigTree::parse("a ="), ConfigError);
  CHECK_THROWS_AS(ConfigTree::parse("just words"), ConfigError);
  CHECK_THROWS_AS(ConfigTree::parse("[sec\nk = 1"), ConfigError);
  CHECK_THROWS_AS(ConfigTree::parse("k = 1\nk = 2"), ConfigError);
  CHECK_THROWS_AS(ConfigTree::parse("k = [1, \"a\"]"), ConfigError);
  CHECK_THROWS_AS(ConfigTree::parse("k = \"unterminated"), ConfigError);
}

TEST_CASE("typed getters reject mismatched values") {
  const auto t = ConfigTree::parse("a = 1.5\nb = \"x\"\n");
  CHECK_THROWS_AS(t.get_bool("a", false), ConfigError);
  CHECK_THROWS_AS(t.get_double("b", 0.0), ConfigError);
  CHECK_THROWS_AS(t.get_int("a", 0), ConfigError);
  CHECK_THROWS_AS(t.require_double("missing"), ConfigError);
}

namespace {
const char* kMinimal = R"(
[kernel]
form = "holder-modulated"
sigma = 1.3
lambda = 1.0
Lambda = 2.0
alpha = 0.5
[domain]
radius = 2.0
h = 0.125
t_start = -1.0
)";
}

TEST_CASE("experiment config validates and fills defaults") {
  const ExperimentConfig cfg = ExperimentConfig::from_tree(ConfigTree::parse(kMinimal));
  CHECK(cfg.problem.kernel.sigma == doctest::Approx(1.3));
  CHECK(cfg.problem.domain_radius == doctest::Approx(2.0));
  CHECK(cfg.solve_opts.h == doctest::Approx(0.125));
  CHECK(cfg.warnings.empty());
  CHECK(cfg.certify);
}

TEST_CASE("unknown keys and unknown forms are config errors") {
  CHECK_THROWS_AS(
      ExperimentConfig::from_tree(ConfigTree::parse(std::string(kMinimal) + "[oops]\nx = 1\n")),
      ConfigError);
  std::string bad(kMinimal);
  bad.replace(bad.find("holder-modulated"), 16, "levy-flight-zzzz");
  CHECK_THROWS_AS(ExperimentConfig::from_tree(ConfigTree::parse(bad)), ConfigError);
}

TEST_CASE("invalid kernel parameters become config errors") {
  std::string bad(kMinimal);
  bad.replace(bad.find("sigma = 1.3"), 11, "sigma = 2.5");
  CHECK_THROWS_AS(ExperimentConfig::from_tree(ConfigTree::parse(bad)), ConfigError);
}

TEST_CASE("near-integer orders propagate a warning") {
  std::string cfg(kMinimal);
  cfg.replace(cfg.find("alpha = 0.5"), 11, "alpha = 0.68");
  const ExperimentConfig parsed = ExperimentConfig::from_tree(ConfigTree::parse(cfg));
  REQUIRE(!parsed.warnings.empty());
  CHECK(parsed.warnings.front().find("0.05") != std::string::npos);
  CHECK(near_integer_warning(1.3, 0.5).empty());
  CHECK(!near_integer_warning(1.95, 0.02).empty());
}

TEST_CASE("periodic problems require initial data") {
  std::string cfg(kMinimal);
  cfg += "[exterior]\nform = \"periodic\"\n";
  CHECK_THROWS_AS(ExperimentConfig::from_tree(ConfigTree::parse(cfg)), ConfigError);
  cfg += "[initial]\nform = \"cosine\"\namplitude = 1.0\n";
  CHECK_NOTHROW(ExperimentConfig::from_tree(ConfigTree::parse(cfg)));
}
