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

// Experiment configuration: sectioned key = value text.
//
//   [physics]      m, omega, tau, n_t                      (all required)
//   [sampler]      n_paths = 10, n_sweeps = 1000, n_hits = 10, seed = 1,
//                  therm_sweeps = 500, delta = tau, tuning = true,
//                  start = cold | hot, proposal = mixture | uniform,
//                  wide_fraction = 0.1, wide_factor = 10, translation = true
//   [observables]  energy, q2, density, correlation = true;
//                  correlation_subtract_mean = false
//   [histogram]    h = auto, or h, q_min, q_max; auto means 200 bins over
//                  +-8 sqrt(<q^2>) of the nearer solvable limit
//   [scan]         variable = m | omega and either values = a, b, c or
//                  from, to, per_decade = 5 (log-spaced, both ends included)
//   [analysis]     segments = 10
//   [output]       dir = relosc_out
//
// Lines starting with '#' or ';' are comments, and so is the rest of a line
// after a blank followed by '#' or ';'. Unknown sections or keys are
// errors.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relosc/errors.hpp"
#include "relosc/experiment.hpp"
#include "relosc/model.hpp"
#include "relosc/sampler.hpp"

namespace relosc::cli {

/// Malformed or invalid configuration text.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class ScanVariable { kMass, kOmega };

struct ScanAxis {
  ScanVariable variable = ScanVariable::kMass;
  std::vector<double> values;
};

struct ExperimentConfig {
  SimParams params{1.0, 1.0, 0.1, 100};
  SamplerConfig sampler;
  MeasurementConfig measurement;
  bool histogram_auto = true;
  std::optional<ScanAxis> scan;
  std::string output_dir = "relosc_out";
};

/// Throws ConfigError with line or key context.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text: every key explicit, fixed order, shortest round-trip
/// decimals. parse_config(serialize_config(c)) reproduces c exactly. Without
/// the [output] section this is the text that config_hash digests.
std::string serialize_config(const ExperimentConfig& config, bool with_output = true);

/// FNV-1a 64 of the canonical text, as 16 hex digits. The output directory
/// does not enter the hash.
std::string config_hash(const ExperimentConfig& config);

/// Hash of (m, omega) only; shared by runs and oracle files.
std::string physics_hash(double mass, double omega);

/// Fills the histogram range from the physics when histogram_auto is set.
void resolve_histogram(ExperimentConfig& config);

/// Config for one point of a scan: the axis value substituted and the scan
/// section removed.
ExperimentConfig scan_point(const ExperimentConfig& config, double value);

std::vector<double> log_spaced(double from, double to, int per_decade);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

std::string_view to_string(ScanVariable v);

}  // namespace relosc::cli
