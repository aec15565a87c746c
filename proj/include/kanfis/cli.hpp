#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kanfis/data.hpp"
#include "kanfis/interpret.hpp"
#include "kanfis/model_io.hpp"
#include "kanfis/training.hpp"

namespace kanfis {

struct DataConfig {
  std::filesystem::path path;  // resolved; empty when a generator is used
  std::string target = "y";
  TaskKind task = TaskKind::Regression;
  SplitSpec split;
  std::string synthetic = "none";  // none | sparse | sine
  std::size_t rows = 2000;
  std::size_t features = 20;
  double noise = 0.1;
  std::uint64_t generator_seed = 7;
};

/// One experiment: data source, split, architecture, optimizer and outputs.
struct RunConfig {
  DataConfig data;
  TrainConfig train;
  std::filesystem::path output_dir = "run";
  double threshold = 0.5;
};

/// Sectioned key = value text. Relative paths resolve against `base_dir`.
/// Unknown sections or keys and malformed values throw ConfigError.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
/// Every key with defaults resolved; parse_run_config reads it back unchanged.
std::string render_run_config(const RunConfig& cfg);

using MetricList = std::vector<std::pair<std::string, double>>;

struct RunResult {
  SavedModel saved;
  TrainReport report;
  RuleSet rules;  // first layer at cfg.threshold, training data
  MetricList metrics;
  double val_metric = 0.0;  // RMSE or accuracy on the held-out split
  double mean_features_per_rule = 0.0;
};

/// Load or generate data, split, standardize features, train, evaluate.
RunResult run_experiment(const RunConfig& cfg);

/// effective.cfg, model.json, epochs.csv, metrics.txt, metrics.json.
void write_run_outputs(const RunConfig& cfg, const RunResult& result, const std::filesystem::path& dir);

/// Entry point for the kanfis command. Exit codes: 0 success, 1 runtime
/// error, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kanfis
