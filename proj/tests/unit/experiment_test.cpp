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

#include "relosc/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <mutex>

#include "relosc/errors.hpp"

using namespace relosc;

namespace {

struct SmallRun {
  SimParams params{1.0, 1.0, 0.25, 16};
  SamplerConfig sampler;
  MeasurementConfig measurement;

  SmallRun() {
    sampler.n_paths = 3;
    sampler.n_sweeps = 200;
    sampler.therm_sweeps = 50;
    sampler.hits_per_site = 2;
    sampler.proposal_half_width = 0.3;
    sampler.seed = 5;
    measurement.histogram_bin_width = 0.25;
    measurement.histogram_q_min = -5.0;
    measurement.histogram_q_max = 5.0;
  }
};

}  // namespace

TEST(Experiment, SeriesShapes) {
  const SmallRun s;
  const EnsembleData data = run_experiment(s.params, s.sampler, s.measurement);
  ASSERT_EQ(data.chains.size(), 3u);
  for (const ChainMeasurements& c : data.chains) {
    EXPECT_EQ(c.kinetic.size(), 200u);
    EXPECT_EQ(c.histogram_counts.size(), 10u);
    EXPECT_EQ(c.correlation_sums.front().size(), data.n_lags());
    std::size_t sweeps = 0;
    for (std::size_t n : c.segment_sweeps) sweeps += n;
    EXPECT_EQ(sweeps, 200u);
  }
  const ObservableSeries e = series(data, Observable::kEnergy);
  const ObservableSeries k = series(data, Observable::kKinetic);
  const ObservableSeries v = series(data, Observable::kPotential);
  ASSERT_EQ(e.values.size(), 600u);
  EXPECT_EQ(e.n_chains(), 3u);
  for (std::size_t i = 0; i < e.values.size(); ++i) EXPECT_EQ(e.values[i], k.values[i] + v.values[i]);
}

TEST(Experiment, MatchesDirectObserverAccumulation) {
  const SmallRun s;
  const EnsembleData data = run_experiment(s.params, s.sampler, s.measurement);
  std::vector<std::vector<double>> corr(3, std::vector<double>(data.n_lags(), 0.0));
  std::vector<std::vector<double>> q2(3);
  std::mutex mu;
  run_chain(s.params, s.sampler, [&](const SweepRecord& r) {
    std::lock_guard lock(mu);
    q2[r.chain_id].push_back(q2_estimate(r.path));
    for (std::size_t n = 0; n < data.n_lags(); ++n) corr[r.chain_id][n] += path_correlation(r.path, n);
  });
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(data.chains[c].q2, q2[c]);
    for (std::size_t n = 0; n < data.n_lags(); ++n) {
      double sum = 0.0;
      for (const auto& seg : data.chains[c].correlation_sums) sum += seg[n];
      EXPECT_NEAR(sum, corr[c][n], 1e-10 * std::abs(corr[c][n]) + 1e-14);
    }
  }
  const CorrelationSeries cs = ensemble_correlation(data);
  double c0 = 0.0;
  for (const auto& per_chain : corr) c0 += per_chain[0];
  EXPECT_NEAR(cs.values[0], c0 / 600.0, 1e-12);
  EXPECT_EQ(cs.time_step, 0.25);
  for (double err : cs.errors) EXPECT_GT(err, 0.0);
}

TEST(Experiment, HistogramIsNormalized) {
  const SmallRun s;
  const EnsembleData data = run_experiment(s.params, s.sampler, s.measurement);
  const HistogramDensity h = ensemble_histogram(data);
  EXPECT_EQ(h.n_bins(), 40u);
  EXPECT_EQ(h.total_samples + h.out_of_range, 600u * 16u);
  double integral = 0.0;
  for (double m : h.masses) integral += m * h.bin_width;
  EXPECT_NEAR(integral, 1.0, 1e-12);
  ASSERT_EQ(h.errors.size(), h.n_bins());
}

TEST(Experiment, DeterministicAcrossJobs) {
  const SmallRun s;
  const EnsembleData one = run_experiment(s.params, s.sampler, s.measurement, 1);
  const EnsembleData two = run_experiment(s.params, s.sampler, s.measurement, 2);
  for (std::size_t c = 0; c < one.chains.size(); ++c) {
    EXPECT_EQ(one.chains[c].kinetic, two.chains[c].kinetic);
    EXPECT_EQ(one.chains[c].histogram_counts, two.chains[c].histogram_counts);
    EXPECT_EQ(one.chains[c].correlation_sums, two.chains[c].correlation_sums);
  }
  const ExperimentSummary a = analyze(one);
  const ExperimentSummary b = analyze(two);
  ASSERT_EQ(a.scalars.size(), b.scalars.size());
  for (std::size_t i = 0; i < a.scalars.size(); ++i) {
    EXPECT_EQ(a.scalars[i].mean, b.scalars[i].mean);
    EXPECT_EQ(a.scalars[i].std_error, b.scalars[i].std_error);
  }
}

TEST(Experiment, AnalyzeProducesScalarsAndFits) {
  SmallRun s;
  s.sampler.n_sweeps = 400;
  const ExperimentSummary sum = analyze(run_experiment(s.params, s.sampler, s.measurement));
  for (const char* name : {"kinetic", "potential", "energy", "q2"}) {
    const ScalarEstimate* e = sum.scalar(name);
    ASSERT_NE(e, nullptr) << name;
    EXPECT_GT(e->std_error, 0.0);
  }
  EXPECT_EQ(sum.scalar("nope"), nullptr);
  ASSERT_TRUE(sum.correlation_fit.has_value());
  ASSERT_TRUE(sum.density_fit.has_value());
  EXPECT_EQ(sum.jackknife_units, 3u);
  EXPECT_GT(sum.correlation_fit->value("b"), 0.0);
}

TEST(Experiment, SelectionFlags) {
  SmallRun s;
  s.measurement.density = false;
  s.measurement.correlation = false;
  const EnsembleData data = run_experiment(s.params, s.sampler, s.measurement);
  EXPECT_TRUE(data.chains[0].histogram_counts.empty());
  const ExperimentSummary sum = analyze(data);
  EXPECT_FALSE(sum.density.has_value());
  EXPECT_FALSE(sum.correlation_fit.has_value());
}

TEST(Experiment, InvalidMeasurementConfig) {
  SmallRun s;
  s.measurement.histogram_bin_width = 0.3;  // 10/0.3 is not whole
  EXPECT_THROW(run_experiment(s.params, s.sampler, s.measurement), ValidationError);
  s = SmallRun{};
  s.measurement.segments_per_chain = 0;
  EXPECT_THROW(run_experiment(s.params, s.sampler, s.measurement), ValidationError);
}

TEST(Experiment, ErrorsUseChainsWhenEnoughOfThem) {
  SmallRun s;
  s.sampler.n_paths = kMinChainErrorUnits;
  s.sampler.n_sweeps = 100;
  const EnsembleData data = run_experiment(s.params, s.sampler, s.measurement);
  const HistogramDensity h = ensemble_histogram(data);
  const CorrelationSeries c = ensemble_correlation(data);
  const std::size_t bin = h.n_bins() / 2;
  std::vector<double> masses, lag1;
  for (const ChainMeasurements& chain : data.chains) {
    std::uint64_t in_bin = 0, total = 0;
    double sum1 = 0.0;
    for (std::size_t seg = 0; seg < chain.histogram_counts.size(); ++seg) {
      in_bin += chain.histogram_counts[seg][bin];
      for (std::uint64_t n : chain.histogram_counts[seg]) total += n;
      sum1 += chain.correlation_sums[seg][1];
    }
    masses.push_back(static_cast<double>(in_bin) / (static_cast<double>(total) * h.bin_width));
    lag1.push_back(sum1 / 100.0);
  }
  EXPECT_NEAR(h.errors[bin], unit_statistic(masses).std_error, 1e-12);
  EXPECT_NEAR(c.errors[1], unit_statistic(lag1).std_error, 1e-12);
}
