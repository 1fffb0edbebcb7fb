#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcl/mnist_experiment.hpp"
#include "dcl/table.hpp"

namespace dcl {

enum class RunMode { theory, simulation, both };
enum class Scale { desk, paper };

struct ExperimentConfig {
  std::string experiment = "custom";
  std::string panel = "a";

  // grid axes
  std::vector<std::string> method{"cocoa"};  // cocoa | ls
  std::vector<std::size_t> K{1};
  std::vector<std::size_t> T{1};
  std::vector<std::size_t> p_S{0};
  std::vector<std::size_t> n_t{1};
  std::vector<std::size_t> T_c{1};
  std::vector<double> eps{0.0};
  std::vector<double> sigma2{0.01};

  std::size_t p = 1;
  std::string param_model = "normalized";  // normalized | random_energy
  double e_w = 1.0;
  std::size_t passes = 0;  // > 0 turns the run into a learning curve

  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;
  Format format = Format::csv;
  RunMode mode = RunMode::both;
  Scale scale = Scale::desk;
  bool exclude_nonfinite = false;
  int threads = 0;  // 0 keeps the OpenMP default

  std::string mnist_dir;
  MnistConfig mnist;

  // filled by the preset
  std::string figure;
  std::string description;
  double scale_factor = 1.0;
};

const std::vector<std::string>& experiment_ids();

/// Paper parameters for `id`, divided down by the desk scale factor when `scale` is desk.
ExperimentConfig preset(const std::string& id, Scale scale, const std::string& panel = "a");

/// Reads a flat YAML map. `experiment`, `scale`, `mode` and `panel` pick the preset;
/// every other key overrides one preset field. Unknown keys raise ConfigError.
/// `mode` replaces the file's mode when given.
ExperimentConfig load_config(const std::string& path, std::optional<RunMode> mode = std::nullopt);
ExperimentConfig parse_config(const std::string& yaml_text, std::optional<RunMode> mode = std::nullopt);

struct ExperimentOutput {
  Table table;
  std::string metadata_json;
};

/// Runs every grid point in grid order.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes the table to cfg.out and the metadata next to it as <out>.meta.json.
void write_output(const ExperimentOutput& out, const ExperimentConfig& cfg);

/// Copy of `t` without the wall-time column, for reproducibility comparisons.
Table without_wall_time(Table t);

}  // namespace dcl
