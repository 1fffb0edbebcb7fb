#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>
#include <CLI11.hpp>

#include "dcl/acceptance.hpp"
#include "dcl/errors.hpp"
#include "dcl/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::optional<std::size_t> trials;
  std::optional<int> parallel;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "YAML experiment config");
  cmd->add_option("--experiment", c.experiment, "preset id when no config is given");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--out", c.out, "output table path (stdout when omitted)");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--trials", c.trials, "Monte-Carlo trials per grid point");
  cmd->add_option("--parallel", c.parallel, "OpenMP threads");
}

dcl::ExperimentConfig build_config(const Common& c, std::optional<dcl::RunMode> forced) {
  if (!c.config.empty()) {
    auto cfg = dcl::load_config(c.config, forced);
    if (!c.experiment.empty() && c.experiment != cfg.experiment)
      throw dcl::ConfigError("experiment", "conflicts with the config file");
    return cfg;
  }
  return dcl::parse_config("experiment: " + (c.experiment.empty() ? std::string("custom") : c.experiment), forced);
}

int run(const Common& c, std::optional<dcl::RunMode> forced) {
  auto cfg = build_config(c, forced);
  if (c.seed) cfg.seed = *c.seed;
  if (c.trials) cfg.trials = *c.trials;
  if (!c.out.empty()) cfg.out = c.out;
  if (!c.format.empty()) cfg.format = dcl::parse_format(c.format);
  if (c.parallel) cfg.threads = *c.parallel;
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

  const auto out = dcl::run_experiment(cfg);
  if (cfg.out.empty()) {
    std::cout << dcl::to_string(out.table, cfg.format);
  } else {
    dcl::write_output(out, cfg);
    std::cerr << "wrote " << out.table.rows.size() << " rows to " << cfg.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed continual learning with CoCoA: closed forms, simulation and verification"};
  app.require_subcommand(1);

  Common theory_opts, sim_opts, mnist_opts;
  auto* theory = app.add_subcommand("theory", "evaluate the closed forms over a preset grid");
  add_common(theory, theory_opts);
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation (with theory unless mode says otherwise)");
  add_common(simulate, sim_opts);
  auto* mnist = app.add_subcommand("mnist", "odd/even MNIST continual classification");
  add_common(mnist, mnist_opts);
  std::string mnist_dir;
  mnist->add_option("--mnist-dir", mnist_dir, "directory with the IDX files (default: config, then DCL_MNIST_DIR)");

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  dcl::AcceptanceOptions acc;
  std::optional<int> verify_threads;
  verify->add_option("--seed", acc.seed, "master seed");
  verify->add_option("--mnist-dir", acc.mnist_dir, "MNIST directory");
  verify->add_option("--mnist-p", acc.mnist_p, "random features for the MNIST criterion");
  verify->add_option("--only", acc.only, "criterion ids to run");
  verify->add_option("--parallel", verify_threads, "OpenMP threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*theory) return run(theory_opts, dcl::RunMode::theory);
    if (*simulate) return run(sim_opts, std::nullopt);
    if (*mnist) {
      Common c = mnist_opts;
      if (c.config.empty() && c.experiment.empty()) c.experiment = "mnist";
      auto cfg = build_config(c, std::nullopt);
      if (cfg.experiment != "mnist") throw dcl::ConfigError("experiment", "the mnist subcommand needs experiment: mnist");
      if (!mnist_dir.empty()) cfg.mnist_dir = mnist_dir;
      if (c.seed) cfg.seed = *c.seed;
      if (c.trials) cfg.mnist.repetitions = *c.trials;
      if (!c.out.empty()) cfg.out = c.out;
      if (!c.format.empty()) cfg.format = dcl::parse_format(c.format);
      if (c.parallel) omp_set_num_threads(*c.parallel);
      const auto out = dcl::run_experiment(cfg);
      if (cfg.out.empty())
        std::cout << dcl::to_string(out.table, cfg.format);
      else
        dcl::write_output(out, cfg);
      return 0;
    }
    if (*verify) {
      if (verify_threads) omp_set_num_threads(*verify_threads);
      const auto results = dcl::run_acceptance(acc, std::cout);
      for (const auto& r : results)
        if (!r.passed) return 1;
      return 0;
    }
  } catch (const dcl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const dcl::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
