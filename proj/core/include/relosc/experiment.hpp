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

// End-to-end measurement: runs the chains, records per-sweep observables into
// per-chain accumulators and reduces them in chain order.
//
// Histogram and correlator data are accumulated in `segments_per_chain`
// consecutive sweep segments per chain. Their error bars are the standard
// error over chains when there are at least kMinChainErrorUnits chains, and
// over all (chain, segment) units otherwise. Fit parameters derived from them
// use jackknife errors over chains (over segments when there is a single
// chain).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relosc/estimators.hpp"
#include "relosc/fits.hpp"
#include "relosc/model.hpp"
#include "relosc/sampler.hpp"

namespace relosc {

inline constexpr std::size_t kMinChainErrorUnits = 10;

struct MeasurementConfig {
  bool energy = true;
  bool q2 = true;
  bool density = true;
  bool correlation = true;
  double histogram_bin_width = 0.01;
  double histogram_q_min = -1.0;
  double histogram_q_max = 1.0;
  bool correlation_subtract_mean = false;
  std::size_t segments_per_chain = 10;

  void validate() const;
};

struct ChainMeasurements {
  std::vector<double> kinetic;
  std::vector<double> potential;
  std::vector<double> q2;
  std::vector<std::vector<std::uint64_t>> histogram_counts;  // [segment][bin]
  std::vector<std::uint64_t> histogram_out_of_range;         // [segment]
  std::vector<std::vector<double>> correlation_sums;         // [segment][lag]
  std::vector<std::size_t> segment_sweeps;                   // [segment]
};

struct EnsembleData {
  SimParams params;
  SamplerConfig sampler;
  MeasurementConfig measurement;
  ChainSummary chain_summary;
  std::vector<ChainMeasurements> chains;

  std::size_t n_lags() const { return params.n_slices() / 2 + 1; }
};

EnsembleData run_experiment(const SimParams& params, const SamplerConfig& sampler,
                            const MeasurementConfig& measurement, std::size_t jobs = 1);

enum class Observable { kKinetic, kPotential, kEnergy, kQ2 };

std::string observable_name(Observable o);

/// Per-sweep series of one observable, chains concatenated in id order.
ObservableSeries series(const EnsembleData& data, Observable o);

struct ScalarEstimate {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t plateau_block_size = 0;
  bool plateau_found = false;
};

struct FitWindow {
  std::size_t first = 0;
  std::size_t last = 0;  // inclusive
};

struct ExperimentSummary {
  std::vector<ScalarEstimate> scalars;
  std::optional<HistogramDensity> density;
  std::optional<CorrelationSeries> correlation;
  std::optional<fits::FitResult> correlation_fit;
  FitWindow correlation_fit_window;
  std::optional<fits::FitResult> density_fit;
  FitWindow density_fit_window;
  std::size_t jackknife_units = 0;

  const ScalarEstimate* scalar(const std::string& name) const;
};

/// Density with masses from the pooled counts and errors from the units.
HistogramDensity ensemble_histogram(const EnsembleData& data);
CorrelationSeries ensemble_correlation(const EnsembleData& data);

ExperimentSummary analyze(const EnsembleData& data);

}  // namespace relosc
