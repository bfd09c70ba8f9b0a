// Command line front end: `nlpde run <config>` executes one experiment from a
// config file, `nlpde suite <name>` runs a named verification suite.
// Exit codes: 0 pass, 1 acceptance failure, 2 config error, 3 numerical error.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlpde/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nonlocal parabolic equations: solver, multiscale construction, exponent fits"};
  app.require_subcommand(1);

  std::string config_path;
  std::string suite_name;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int threads = 1;
  bool quick = false;

  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment from a config file");
  run_cmd->add_option("config", config_path, "config file (key = value tree)")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides the config)");
  run_cmd->add_option("--seed", seed, "seed for sampling-based certification")
      ->each([&](const std::string&) { have_seed = true; });
  run_cmd->add_option("--threads", threads, "worker threads");

  CLI::App* suite_cmd =
      app.add_subcommand("suite", "run a verification suite and print its table");
  suite_cmd->add_option("name", suite_name, "certify | convergence | schauder | sigma-sweep")
      ->required();
  suite_cmd->add_option("--out", out_dir, "directory for emitted data files");
  suite_cmd->add_option("--seed", seed, "sampling seed");
  suite_cmd->add_option("--threads", threads, "worker threads");
  suite_cmd->add_flag("--quick", quick, "reduced resolution (plumbing check, not acceptance)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      nlpde::ExperimentConfig cfg = nlpde::ExperimentConfig::from_file(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (have_seed) cfg.seed = seed;
      if (threads > 1) cfg.threads = threads;
      cfg.solve_opts.threads = cfg.threads;
      cfg.scheme.threads = cfg.threads;
      const nlpde::RunReport report = nlpde::run_experiment(cfg);
      std::cout << report.json_text;
      for (const auto& f : report.emitted_files) std::cerr << "wrote " << f << "\n";
      return report.exit_code;
    }
    nlpde::SuiteOptions opts;
    opts.seed = have_seed ? seed : 1;
    opts.threads = threads;
    opts.out_dir = out_dir;
    opts.quick = quick;
    const nlpde::SuiteResult result = nlpde::run_suite(suite_name, opts);
    std::cout << result.table();
    return result.all_pass() ? 0 : 1;
  } catch (const nlpde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
