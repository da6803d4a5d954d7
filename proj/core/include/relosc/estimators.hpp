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

// Per-path observables and their statistical analysis.
//
// kinetic_estimate is the thermodynamic estimator obtained from -d/dtau of the
// logarithm of the relativistic link factor; it includes the rest mass.
// Error bars on scalar series come from blocking inside chain boundaries.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relosc/model.hpp"

namespace relosc {

double kinetic_estimate(const Path& path, const SimParams& params);
double potential_estimate(const Path& path, const SimParams& params);
double total_energy_estimate(const Path& path, const SimParams& params);
double q2_estimate(const Path& path);

/// (1/N_t) sum_i q_i q_{i+lag mod N_t}; with subtract_mean the path mean is
/// removed first.
double path_correlation(const Path& path, std::size_t lag, bool subtract_mean = false);

/// Adds path_correlation(path, n) for n = 0..out.size()-1 into `out`.
void accumulate_correlations(const Path& path, std::span<double> out, bool subtract_mean = false);

/// Ensemble average of q_i q_{i+lag} over every site of every path.
double correlation(std::span<const Path> ensemble, std::size_t lag, bool subtract_mean = false);

// ---------------------------------------------------------------------------
// Scalar series and blocking

/// Concatenated per-sweep measurements of several chains. chain_starts holds
/// the offset of each chain's first value (first entry is 0).
struct ObservableSeries {
  std::string name;
  std::vector<double> values;
  std::vector<std::size_t> chain_starts{0};

  void begin_chain() {
    if (!values.empty()) chain_starts.push_back(values.size());
  }
  std::size_t n_chains() const { return chain_starts.size(); }
  std::span<const double> chain(std::size_t k) const;
};

struct BlockedMean {
  std::size_t block_size = 0;
  std::size_t n_blocks = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean of block means and its standard error for a fixed block size. Blocks
/// never straddle a chain boundary; a chain's incomplete last block is
/// dropped. Throws InsufficientDataError below 10 blocks.
BlockedMean blocked_error(const ObservableSeries& series, std::size_t block_size);

struct BlockingAnalysis {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t plateau_block_size = 1;
  bool plateau_found = false;
  std::vector<BlockedMean> levels;  // block sizes 1, 2, 4, ...
};

/// Doubles the block size while at least 16 blocks remain and picks the first
/// level beyond which the error no longer grows significantly.
BlockingAnalysis blocking_analysis(const ObservableSeries& series);

// ---------------------------------------------------------------------------
// Density histogram

struct HistogramDensity {
  double q_min = 0.0;
  double bin_width = 0.0;
  std::vector<double> masses;  // normalized: sum(masses) * bin_width == 1
  std::vector<double> errors;  // statistical error of each mass (may be empty)
  std::uint64_t total_samples = 0;
  std::uint64_t out_of_range = 0;

  std::size_t n_bins() const { return masses.size(); }
  double bin_left(std::size_t b) const { return q_min + bin_width * static_cast<double>(b); }
  double bin_right(std::size_t b) const { return bin_left(b + 1); }
  double bin_center(std::size_t b) const { return bin_left(b) + 0.5 * bin_width; }
};

/// Fixed-width binning of [q_min, q_max) into round((q_max - q_min)/h) bins.
class HistogramBins {
 public:
  HistogramBins(double bin_width, double q_min, double q_max);

  std::size_t n_bins() const { return n_bins_; }
  double bin_width() const { return bin_width_; }
  double q_min() const { return q_min_; }
  /// Bin index, or n_bins() when out of range.
  std::size_t index(double q) const;

 private:
  double bin_width_;
  double q_min_;
  std::size_t n_bins_;
};

/// Maximum tolerated out-of-range fraction before density_histogram fails.
inline constexpr double kMaxOutOfRangeFraction = 1e-3;

/// mass_b = count_b / (in-range total * h). Normalizes over in-range samples
/// and reports the out-of-range count; throws ValidationError when more than
/// 0.1% of the samples fall outside the range.
HistogramDensity density_histogram(std::span<const double> samples, double bin_width,
                                   double q_min, double q_max);

/// Same normalization from already accumulated counts.
HistogramDensity histogram_from_counts(const HistogramBins& bins,
                                       std::span<const std::uint64_t> counts,
                                       std::uint64_t out_of_range);

// ---------------------------------------------------------------------------
// Correlator

struct CorrelationSeries {
  double time_step = 0.0;
  std::vector<double> values;  // C(n), n = 0..N_t/2
  std::vector<double> errors;

  std::size_t n_lags() const { return values.size(); }
};

/// Mean and standard error of equally weighted unit means (e.g. chain
/// segments). Needs at least two units for a nonzero error.
struct UnitStatistic {
  double mean = 0.0;
  double std_error = 0.0;
};
UnitStatistic unit_statistic(std::span<const double> unit_means);

/// Jackknife standard error sqrt((N-1)/N * sum (theta_k - mean)^2) from the
/// N leave-one-out estimates theta_k.
double jackknife_error(std::span<const double> leave_one_out);

}  // namespace relosc
