#pragma once

/*
 * Batch experiment front door. Subcommands: certify, simulate, clt,
 * ratio, delta, lyapunov, eigen-clt, regularity, decay, counterexample.
 *
 * Configuration is a single JSON document; command-line flags override
 * config fields. Exit codes:
 *
 *   0  success
 *   2  config / parse error
 *   3  certificate contract violation (certify)
 *   4  hard invariant of the exact class failed
 *   5  numerical failure (with trial index where available)
 */

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmp/measure.hpp"

namespace rmp::cli {

enum class OutputFormat { Csv, Json, Both };

struct ExperimentConfig {
  nlohmann::json measure_spec;  // retained for the config echo
  std::int64_t n = 200;
  std::vector<std::int64_t> checkpoints;  // empty -> {n}
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = available parallelism; never affects output
  std::vector<double> eps_grid;
  std::vector<double> t_grid;
  std::filesystem::path out_dir = "out";
  OutputFormat format = OutputFormat::Both;
  std::string side = "left";

  // clt
  std::string observable = "log_specrad";
  std::string centering = "pilot";  // or "in_sample"
  std::int64_t pilot_n = 0;         // 0 -> 2n
  std::int64_t pilot_trials = 2000;

  // regularity
  std::int64_t reg_points = 10000;
  std::int64_t hyperplane_seeds = 1000;
  std::int64_t reg_walk_n = 256;

  // decay
  int decay_item = 2;
  std::vector<std::int64_t> n_grid;
  std::optional<double> decay_rate;
  std::int64_t far_n = 0;

  // counterexample
  double ce_lambda = 2.0;
  double ce_theta = 0.5;

  // certify
  std::string matrix_file;
  std::int64_t certify_random = 0;
  int certify_dim_min = 2;
  int certify_dim_max = 6;
};

/// Parses the experiment-level fields of a config JSON document into cfg
/// (leaving absent fields untouched) and stores the measure spec.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& cfg);

/// Builds the measure from the stored spec (default: positive_pair).
MatrixMeasure build_measure(const ExperimentConfig& cfg);

/// JSON config echo embedded in every artifact; reparses to an equal
/// config. Thread count is deliberately not part of the echo.
nlohmann::json config_echo_json(const ExperimentConfig& cfg);

/// Full CLI entry point. args excludes argv[0]. Returns the exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace rmp::cli
