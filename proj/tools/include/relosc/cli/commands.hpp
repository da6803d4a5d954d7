// Copyright 2026 The relosc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Subcommand implementations. Each throws on failure; run_cli maps
// exceptions to exit codes.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relosc/cli/config.hpp"
#include "relosc/experiment.hpp"

namespace relosc::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kRuntimeError = 2, kComparisonFailure = 3 };

/// Inputs carry different config or physics hashes.
class HashMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one experiment and writes every artifact into `dir`.
ExperimentSummary run_to_directory(const ExperimentConfig& config, const std::filesystem::path& dir,
                                   std::size_t jobs, std::ostream& log);

/// One run per scan value in dir/point_NNN plus dir/scan.csv.
void scan_to_directory(const ExperimentConfig& config, const std::filesystem::path& dir, std::size_t jobs,
                       std::ostream& log);

struct OracleRequest {
  std::string regime;  // sho | ultra | grid
  double mass = 0.0;
  double omega = 0.0;
  std::size_t grid_points = 4096;
  std::optional<double> p_max;
};

/// Writes oracle_<regime>.json and oracle_<regime>_density.csv into `dir`
/// and returns the JSON document.
nlohmann::json oracle_to_directory(const OracleRequest& request, const std::filesystem::path& dir,
                                   std::ostream& log);

struct ComparisonRow {
  std::string observable;
  double simulated = 0.0;
  double simulated_error = 0.0;
  double reference = 0.0;
  double reference_error = 0.0;
  double difference = 0.0;
  double z = 0.0;  // difference / combined error; inf when the errors vanish
  bool pass = true;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool pass = true;
  std::string table() const;  // CSV with header
};

/// Compares run_dir/summary.json (or a summary file) against a reference
/// document of the same schema. Throws HashMismatch unless `force`.
Comparison compare(const std::filesystem::path& run, const std::filesystem::path& reference, double tolerance,
                   bool force);

struct FitRequest {
  std::string model;  // exponential | gaussian | constant | power
  std::filesystem::path input;
  std::string observable;  // scan tables only
  double exponent = -1.0;
  double scale = 1.0;
  double x_scale = 1.0;
  std::optional<double> x_min;
  std::optional<double> x_max;
};

nlohmann::json fit_file(const FitRequest& request);

/// Full command line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relosc::cli
