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

#include "relosc/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "relosc/errors.hpp"
#include "relosc/specfun.hpp"

namespace relosc {

double kinetic_estimate(const Path& path, const SimParams& params) {
  const double m = params.mass();
  const double tau = params.time_step();
  const double tau2 = tau * tau;
  const std::size_t n = path.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dq = path[path.next(i)] - path[i];
    const double dq2 = dq * dq;
    const double r2 = tau2 + dq2;
    const double r = std::sqrt(r2);
    sum += m * tau / r * specfun::bessel_k_ratio(m * r) + (tau2 - dq2) / (tau * r2);
  }
  return sum / static_cast<double>(n);
}

double potential_estimate(const Path& path, const SimParams& params) {
  double sum = 0.0;
  for (double q : path.sites()) sum += potential(q, params);
  return sum / static_cast<double>(path.size());
}

double total_energy_estimate(const Path& path, const SimParams& params) {
  return kinetic_estimate(path, params) + potential_estimate(path, params);
}

double q2_estimate(const Path& path) {
  double sum = 0.0;
  for (double q : path.sites()) sum += q * q;
  return sum / static_cast<double>(path.size());
}

namespace {

// sum_i a[i] * b[i] with eight interleaved partial sums (fixed order).
double dot(const double* a, const double* b, std::size_t n) {
  std::array<double, 8> acc{};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t k = 0; k < 8; ++k) acc[k] += a[i + k] * b[i + k];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

std::vector<double> doubled_sites(const Path& path, bool subtract_mean) {
  const std::size_t n = path.size();
  std::vector<double> q(2 * n);
  double shift = 0.0;
  if (subtract_mean) {
    shift = std::accumulate(path.sites().begin(), path.sites().end(), 0.0) / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) q[i] = q[i + n] = path[i] - shift;
  return q;
}

}  // namespace

double path_correlation(const Path& path, std::size_t lag, bool subtract_mean) {
  const std::size_t n = path.size();
  const std::vector<double> q = doubled_sites(path, subtract_mean);
  return dot(q.data(), q.data() + (lag % n), n) / static_cast<double>(n);
}

void accumulate_correlations(const Path& path, std::span<double> out, bool subtract_mean) {
  const std::size_t n = path.size();
  const std::vector<double> q = doubled_sites(path, subtract_mean);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t lag = 0; lag < out.size(); ++lag) {
    out[lag] += dot(q.data(), q.data() + (lag % n), n) * inv_n;
  }
}

double correlation(std::span<const Path> ensemble, std::size_t lag, bool subtract_mean) {
  if (ensemble.empty()) throw InsufficientDataError("correlation: empty ensemble");
  double sum = 0.0;
  for (const Path& p : ensemble) sum += path_correlation(p, lag, subtract_mean);
  return sum / static_cast<double>(ensemble.size());
}

std::span<const double> ObservableSeries::chain(std::size_t k) const {
  const std::size_t begin = chain_starts.at(k);
  const std::size_t end = k + 1 < chain_starts.size() ? chain_starts[k + 1] : values.size();
  return std::span<const double>(values).subspan(begin, end - begin);
}

BlockedMean blocked_error(const ObservableSeries& series, std::size_t block_size) {
  if (block_size == 0) throw ValidationError("blocked_error: block size must be at least 1");
  std::vector<double> block_means;
  for (std::size_t k = 0; k < series.n_chains(); ++k) {
    const auto chain = series.chain(k);
    for (std::size_t start = 0; start + block_size <= chain.size(); start += block_size) {
      double sum = 0.0;
      for (std::size_t j = 0; j < block_size; ++j) sum += chain[start + j];
      block_means.push_back(sum / static_cast<double>(block_size));
    }
  }
  if (block_means.size() < 10) {
    throw InsufficientDataError("blocked_error: series '" + series.name + "' yields only " +
                                std::to_string(block_means.size()) + " blocks of size " +
                                std::to_string(block_size) + " (need 10)");
  }
  const UnitStatistic stat = unit_statistic(block_means);
  return {block_size, block_means.size(), stat.mean, stat.std_error};
}

BlockingAnalysis blocking_analysis(const ObservableSeries& series) {
  BlockingAnalysis out;
  out.levels.push_back(blocked_error(series, 1));
  for (std::size_t b = 2;; b *= 2) {
    std::size_t n_blocks = 0;
    for (std::size_t k = 0; k < series.n_chains(); ++k) n_blocks += series.chain(k).size() / b;
    if (n_blocks < 16) break;
    out.levels.push_back(blocked_error(series, b));
  }
  out.mean = out.levels.front().mean;

  const std::size_t n_levels = out.levels.size();
  std::size_t plateau = n_levels - 1;
  for (std::size_t j = 0; j < n_levels; ++j) {
    bool flat = true;
    for (std::size_t later = j + 1; later < n_levels && flat; ++later) {
      const BlockedMean& l = out.levels[later];
      const double allowance = 2.0 / std::sqrt(2.0 * static_cast<double>(l.n_blocks - 1));
      flat = l.std_error <= out.levels[j].std_error * (1.0 + allowance);
    }
    if (flat) {
      plateau = j;
      break;
    }
  }
  out.plateau_block_size = out.levels[plateau].block_size;
  out.plateau_found = plateau + 1 < n_levels;
  out.std_error = out.levels[plateau].std_error;
  return out;
}

HistogramBins::HistogramBins(double bin_width, double q_min, double q_max)
    : bin_width_(bin_width), q_min_(q_min), n_bins_(0) {
  if (!std::isfinite(bin_width) || !(bin_width > 0.0)) {
    throw ValidationError("histogram: bin width h must be positive");
  }
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_max > q_min)) {
    throw ValidationError("histogram: range requires q_min < q_max");
  }
  const double bins = (q_max - q_min) / bin_width;
  const double rounded = std::round(bins);
  if (rounded < 1.0 || std::fabs(bins - rounded) > 1e-6 * std::max(1.0, rounded)) {
    throw ValidationError("histogram: range (q_max - q_min) must be a whole number of bins");
  }
  n_bins_ = static_cast<std::size_t>(rounded);
}

std::size_t HistogramBins::index(double q) const {
  const double t = (q - q_min_) / bin_width_;
  if (!(t >= 0.0) || t >= static_cast<double>(n_bins_)) return n_bins_;
  return std::min(static_cast<std::size_t>(t), n_bins_ - 1);
}

HistogramDensity histogram_from_counts(const HistogramBins& bins,
                                       std::span<const std::uint64_t> counts,
                                       std::uint64_t out_of_range) {
  HistogramDensity d;
  d.q_min = bins.q_min();
  d.bin_width = bins.bin_width();
  const std::uint64_t in_range = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  d.total_samples = in_range + out_of_range;
  d.out_of_range = out_of_range;
  d.masses.assign(counts.size(), 0.0);
  if (in_range > 0) {
    const double norm = 1.0 / (static_cast<double>(in_range) * bins.bin_width());
    for (std::size_t b = 0; b < counts.size(); ++b) {
      d.masses[b] = static_cast<double>(counts[b]) * norm;
    }
  }
  return d;
}

HistogramDensity density_histogram(std::span<const double> samples, double bin_width,
                                   double q_min, double q_max) {
  const HistogramBins bins(bin_width, q_min, q_max);
  std::vector<std::uint64_t> counts(bins.n_bins(), 0);
  std::uint64_t outside = 0;
  for (double q : samples) {
    const std::size_t b = bins.index(q);
    if (b == bins.n_bins()) {
      ++outside;
    } else {
      ++counts[b];
    }
  }
  if (samples.empty()) throw InsufficientDataError("density_histogram: no samples");
  if (static_cast<double>(outside) > kMaxOutOfRangeFraction * static_cast<double>(samples.size())) {
    throw ValidationError("density_histogram: " + std::to_string(outside) + " of " +
                          std::to_string(samples.size()) +
                          " samples fall outside [q_min, q_max); widen the range");
  }
  return histogram_from_counts(bins, counts, outside);
}

UnitStatistic unit_statistic(std::span<const double> unit_means) {
  UnitStatistic s;
  const std::size_t n = unit_means.size();
  if (n == 0) return s;
  s.mean = std::accumulate(unit_means.begin(), unit_means.end(), 0.0) / static_cast<double>(n);
  if (n < 2) return s;
  double ss = 0.0;
  for (double v : unit_means) ss += (v - s.mean) * (v - s.mean);
  s.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return s;
}

double jackknife_error(std::span<const double> leave_one_out) {
  const std::size_t n = leave_one_out.size();
  if (n < 2) return 0.0;
  const double mean =
      std::accumulate(leave_one_out.begin(), leave_one_out.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : leave_one_out) ss += (v - mean) * (v - mean);
  return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
}

}  // namespace relosc
