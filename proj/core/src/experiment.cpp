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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "relosc/errors.hpp"

namespace relosc {

void MeasurementConfig::validate() const {
  if (segments_per_chain == 0) throw ValidationError("segments: must be positive");
  if (density) HistogramBins(histogram_bin_width, histogram_q_min, histogram_q_max);
}

EnsembleData run_experiment(const SimParams& params, const SamplerConfig& sampler,
                            const MeasurementConfig& measurement, std::size_t jobs) {
  sampler.validate();
  measurement.validate();
  EnsembleData data{params, sampler, measurement, {}, {}};
  const std::size_t n_segments = std::min(measurement.segments_per_chain, sampler.n_sweeps);
  const std::size_t n_lags = data.n_lags();
  std::optional<HistogramBins> bins;
  if (measurement.density) {
    bins.emplace(measurement.histogram_bin_width, measurement.histogram_q_min,
                 measurement.histogram_q_max);
  }

  data.chains.resize(sampler.n_paths);
  for (ChainMeasurements& c : data.chains) {
    if (measurement.energy) {
      c.kinetic.reserve(sampler.n_sweeps);
      c.potential.reserve(sampler.n_sweeps);
    }
    if (measurement.q2) c.q2.reserve(sampler.n_sweeps);
    c.segment_sweeps.assign(n_segments, 0);
    if (bins) {
      c.histogram_counts.assign(n_segments, std::vector<std::uint64_t>(bins->n_bins(), 0));
      c.histogram_out_of_range.assign(n_segments, 0);
    }
    if (measurement.correlation) c.correlation_sums.assign(n_segments, std::vector<double>(n_lags, 0.0));
  }

  const SweepObserver observer = [&](const SweepRecord& rec) {
    ChainMeasurements& c = data.chains[rec.chain_id];
    const std::size_t seg = rec.sweep_index * n_segments / sampler.n_sweeps;
    ++c.segment_sweeps[seg];
    if (measurement.energy) {
      c.kinetic.push_back(kinetic_estimate(rec.path, params));
      c.potential.push_back(potential_estimate(rec.path, params));
    }
    if (measurement.q2) c.q2.push_back(q2_estimate(rec.path));
    if (bins) {
      auto& counts = c.histogram_counts[seg];
      for (double q : rec.path.sites()) {
        const std::size_t b = bins->index(q);
        if (b == bins->n_bins()) {
          ++c.histogram_out_of_range[seg];
        } else {
          ++counts[b];
        }
      }
    }
    if (measurement.correlation) {
      accumulate_correlations(rec.path, c.correlation_sums[seg], measurement.correlation_subtract_mean);
    }
  };
  data.chain_summary = run_chain(params, sampler, observer, jobs);
  return data;
}

std::string observable_name(Observable o) {
  switch (o) {
    case Observable::kKinetic: return "kinetic";
    case Observable::kPotential: return "potential";
    case Observable::kEnergy: return "energy";
    case Observable::kQ2: return "q2";
  }
  return "unknown";
}

ObservableSeries series(const EnsembleData& data, Observable o) {
  ObservableSeries s;
  s.name = observable_name(o);
  for (const ChainMeasurements& c : data.chains) {
    s.begin_chain();
    switch (o) {
      case Observable::kKinetic:
        s.values.insert(s.values.end(), c.kinetic.begin(), c.kinetic.end());
        break;
      case Observable::kPotential:
        s.values.insert(s.values.end(), c.potential.begin(), c.potential.end());
        break;
      case Observable::kEnergy:
        for (std::size_t i = 0; i < c.kinetic.size(); ++i) s.values.push_back(c.kinetic[i] + c.potential[i]);
        break;
      case Observable::kQ2:
        s.values.insert(s.values.end(), c.q2.begin(), c.q2.end());
        break;
    }
  }
  return s;
}

const ScalarEstimate* ExperimentSummary::scalar(const std::string& name) const {
  for (const ScalarEstimate& s : scalars) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace {

// A jackknife unit: either a whole chain or one segment of a single chain.
struct Unit {
  std::size_t chain;
  std::optional<std::size_t> segment;
};

std::vector<Unit> jackknife_units(const EnsembleData& data) {
  std::vector<Unit> units;
  if (data.chains.size() >= 2) {
    for (std::size_t k = 0; k < data.chains.size(); ++k) units.push_back({k, std::nullopt});
  } else if (!data.chains.empty()) {
    for (std::size_t s = 0; s < data.chains[0].segment_sweeps.size(); ++s) units.push_back({0, s});
  }
  return units;
}

// Error bars on histogram and correlator: whole chains when there are enough
// of them, otherwise every (chain, segment) pair. Segments shorter than the
// autocorrelation time make the latter too small.
std::vector<Unit> error_units(const EnsembleData& data) {
  std::vector<Unit> units;
  if (data.chains.size() >= kMinChainErrorUnits) {
    for (std::size_t k = 0; k < data.chains.size(); ++k) units.push_back({k, std::nullopt});
    return units;
  }
  for (std::size_t k = 0; k < data.chains.size(); ++k) {
    for (std::size_t s = 0; s < data.chains[k].segment_sweeps.size(); ++s) units.push_back({k, s});
  }
  return units;
}

bool in_unit(const Unit& u, std::size_t chain, std::size_t segment) {
  return u.chain == chain && (!u.segment || *u.segment == segment);
}

HistogramBins bins_of(const EnsembleData& data) {
  return {data.measurement.histogram_bin_width, data.measurement.histogram_q_min,
          data.measurement.histogram_q_max};
}

// Pooled histogram, optionally leaving one unit out.
HistogramDensity pooled_histogram(const EnsembleData& data, const Unit* excluded) {
  const HistogramBins bins = bins_of(data);
  std::vector<std::uint64_t> counts(bins.n_bins(), 0);
  std::uint64_t outside = 0;
  for (std::size_t k = 0; k < data.chains.size(); ++k) {
    const ChainMeasurements& c = data.chains[k];
    for (std::size_t s = 0; s < c.histogram_counts.size(); ++s) {
      if (excluded && in_unit(*excluded, k, s)) continue;
      for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += c.histogram_counts[s][b];
      outside += c.histogram_out_of_range[s];
    }
  }
  return histogram_from_counts(bins, counts, outside);
}

std::vector<double> pooled_correlation(const EnsembleData& data, const Unit* excluded) {
  std::vector<double> sums(data.n_lags(), 0.0);
  std::size_t sweeps = 0;
  for (std::size_t k = 0; k < data.chains.size(); ++k) {
    const ChainMeasurements& c = data.chains[k];
    for (std::size_t s = 0; s < c.correlation_sums.size(); ++s) {
      if (excluded && in_unit(*excluded, k, s)) continue;
      for (std::size_t n = 0; n < sums.size(); ++n) sums[n] += c.correlation_sums[s][n];
      sweeps += c.segment_sweeps[s];
    }
  }
  for (double& v : sums) v /= static_cast<double>(std::max<std::size_t>(sweeps, 1));
  return sums;
}

std::vector<fits::DataPoint> correlation_points(const CorrelationSeries& corr,
                                                std::span<const double> values,
                                                const FitWindow& w) {
  std::vector<fits::DataPoint> pts;
  for (std::size_t n = w.first; n <= w.last; ++n) {
    pts.push_back({corr.time_step * static_cast<double>(n), values[n], corr.errors[n]});
  }
  return pts;
}

std::vector<fits::DataPoint> density_points(const HistogramDensity& hist,
                                            std::span<const double> masses, const FitWindow& w) {
  std::vector<fits::DataPoint> pts;
  for (std::size_t b = w.first; b <= w.last; ++b) {
    pts.push_back({hist.bin_center(b), masses[b], hist.errors[b]});
  }
  return pts;
}

// Replaces curvature errors with jackknife errors of the same fit.
void apply_jackknife(fits::FitResult& fit, std::size_t n_units,
                     const std::function<fits::FitResult(std::size_t)>& refit) {
  if (n_units < 2) return;
  std::vector<std::vector<double>> samples(fit.parameters.size());
  for (std::size_t u = 0; u < n_units; ++u) {
    const fits::FitResult r = refit(u);
    for (std::size_t p = 0; p < fit.parameters.size(); ++p) samples[p].push_back(r.parameters[p].value);
  }
  std::string curvature = "curvature errors:";
  for (std::size_t p = 0; p < fit.parameters.size(); ++p) {
    curvature += " " + fit.parameters[p].name + "=" + std::to_string(fit.parameters[p].std_error);
    fit.parameters[p].std_error = jackknife_error(samples[p]);
  }
  fit.diagnostics += (fit.diagnostics.empty() ? "" : "; ") + std::string("jackknife over ") +
                     std::to_string(n_units) + " units; " + curvature;
}

}  // namespace

HistogramDensity ensemble_histogram(const EnsembleData& data) {
  HistogramDensity hist = pooled_histogram(data, nullptr);
  const HistogramBins bins = bins_of(data);
  std::vector<std::vector<double>> unit_masses(bins.n_bins());
  for (const Unit& u : error_units(data)) {
    const ChainMeasurements& c = data.chains[u.chain];
    std::vector<std::uint64_t> counts(bins.n_bins(), 0);
    for (std::size_t s = 0; s < c.histogram_counts.size(); ++s) {
      if (!in_unit(u, u.chain, s)) continue;
      for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += c.histogram_counts[s][b];
    }
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) continue;
    const double norm = 1.0 / (static_cast<double>(total) * bins.bin_width());
    for (std::size_t b = 0; b < counts.size(); ++b) unit_masses[b].push_back(static_cast<double>(counts[b]) * norm);
  }
  hist.errors.resize(bins.n_bins());
  for (std::size_t b = 0; b < bins.n_bins(); ++b) hist.errors[b] = unit_statistic(unit_masses[b]).std_error;
  return hist;
}

CorrelationSeries ensemble_correlation(const EnsembleData& data) {
  CorrelationSeries corr;
  corr.time_step = data.params.time_step();
  corr.values = pooled_correlation(data, nullptr);
  corr.errors.assign(corr.values.size(), 0.0);
  std::vector<std::vector<double>> unit_values(corr.values.size());
  for (const Unit& u : error_units(data)) {
    const ChainMeasurements& c = data.chains[u.chain];
    std::vector<double> sums(corr.values.size(), 0.0);
    std::size_t sweeps = 0;
    for (std::size_t s = 0; s < c.correlation_sums.size(); ++s) {
      if (!in_unit(u, u.chain, s)) continue;
      for (std::size_t n = 0; n < sums.size(); ++n) sums[n] += c.correlation_sums[s][n];
      sweeps += c.segment_sweeps[s];
    }
    if (sweeps == 0) continue;
    for (std::size_t n = 0; n < sums.size(); ++n) unit_values[n].push_back(sums[n] / static_cast<double>(sweeps));
  }
  for (std::size_t n = 0; n < corr.values.size(); ++n) corr.errors[n] = unit_statistic(unit_values[n]).std_error;
  return corr;
}

ExperimentSummary analyze(const EnsembleData& data) {
  ExperimentSummary out;
  std::vector<Observable> observables;
  if (data.measurement.energy) {
    observables.insert(observables.end(), {Observable::kKinetic, Observable::kPotential, Observable::kEnergy});
  }
  if (data.measurement.q2) observables.push_back(Observable::kQ2);
  for (Observable o : observables) {
    const BlockingAnalysis b = blocking_analysis(series(data, o));
    out.scalars.push_back({observable_name(o), b.mean, b.std_error, b.plateau_block_size, b.plateau_found});
  }

  const std::vector<Unit> units = jackknife_units(data);
  out.jackknife_units = units.size();

  if (data.measurement.correlation) {
    const CorrelationSeries corr = ensemble_correlation(data);
    // Lags from 0 while the signal stays above 3 sigma, at most N_t/4 so the
    // periodic image e^{-gap (beta - s)} stays negligible.
    const std::size_t max_lag = data.params.n_slices() / 4;
    std::size_t last = 0;
    while (last + 1 <= max_lag && last + 1 < corr.n_lags() &&
           corr.values[last + 1] > 3.0 * corr.errors[last + 1]) {
      ++last;
    }
    out.correlation_fit_window = {0, last};
    if (last >= 2 && corr.values[0] > 3.0 * corr.errors[0]) {
      fits::FitResult fit = fits::fit_exponential(correlation_points(corr, corr.values, out.correlation_fit_window));
      apply_jackknife(fit, units.size(), [&](std::size_t u) {
        const std::vector<double> v = pooled_correlation(data, &units[u]);
        return fits::fit_exponential(correlation_points(corr, v, out.correlation_fit_window));
      });
      out.correlation_fit = std::move(fit);
    }
    out.correlation = corr;
  }

  if (data.measurement.density) {
    HistogramDensity hist = ensemble_histogram(data);
    if (static_cast<double>(hist.out_of_range) >
        kMaxOutOfRangeFraction * static_cast<double>(std::max<std::uint64_t>(hist.total_samples, 1))) {
      throw ValidationError("density: " + std::to_string(hist.out_of_range) + " of " +
                            std::to_string(hist.total_samples) +
                            " samples fall outside [q_min, q_max); widen the histogram range");
    }
    // Contiguous block of significant bins around the peak.
    const auto peak = static_cast<std::size_t>(
        std::max_element(hist.masses.begin(), hist.masses.end()) - hist.masses.begin());
    auto significant = [&](std::size_t b) { return hist.masses[b] > 3.0 * hist.errors[b] && hist.errors[b] > 0.0; };
    if (significant(peak)) {
      std::size_t first = peak, last = peak;
      while (first > 0 && significant(first - 1)) --first;
      while (last + 1 < hist.n_bins() && significant(last + 1)) ++last;
      out.density_fit_window = {first, last};
      if (last - first >= 2) {
        fits::FitResult fit = fits::fit_gaussian(density_points(hist, hist.masses, out.density_fit_window));
        apply_jackknife(fit, units.size(), [&](std::size_t u) {
          const HistogramDensity h = pooled_histogram(data, &units[u]);
          return fits::fit_gaussian(density_points(hist, h.masses, out.density_fit_window));
        });
        out.density_fit = std::move(fit);
      }
    }
    out.density = std::move(hist);
  }
  return out;
}

}  // namespace relosc
