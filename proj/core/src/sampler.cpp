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

#include "relosc/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "relosc/errors.hpp"

namespace relosc {

std::string_view to_string(StartMode mode) {
  return mode == StartMode::kCold ? "cold" : "hot";
}

std::string_view to_string(ProposalKind kind) {
  return kind == ProposalKind::kUniform ? "uniform" : "mixture";
}

void SamplerConfig::validate() const {
  if (n_paths == 0) throw ValidationError("n_paths: must be positive");
  if (n_sweeps == 0) throw ValidationError("n_sweeps: must be positive");
  if (hits_per_site == 0) throw ValidationError("n_hits: must be positive");
  if (!std::isfinite(proposal_half_width) || !(proposal_half_width > 0.0)) {
    throw ValidationError("delta: proposal half-width must be positive and finite");
  }
  if (!(wide_fraction >= 0.0 && wide_fraction <= 1.0)) {
    throw ValidationError("wide_fraction: must lie in [0, 1]");
  }
  if (!std::isfinite(wide_factor) || !(wide_factor >= 1.0)) {
    throw ValidationError("wide_factor: must be at least 1");
  }
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0)) {
    throw ValidationError("target_acceptance: must lie in (0, 1)");
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hits at one site with its neighbours fixed; the current weight is carried
// across hits so each hit costs one weight evaluation.
std::size_t site_hits(ChainState& state, std::size_t i, std::size_t hits,
                      const SimParams& params, const SamplerConfig& config) {
  Path& path = state.path;
  double current = path[i];
  double current_weight = log_site_weight_at(path, i, current, params);
  const bool mixture = config.proposal == ProposalKind::kMixture;
  std::size_t accepted = 0;
  for (std::size_t h = 0; h < hits; ++h) {
    double width = state.delta;
    if (mixture && uniform01(state.rng) < config.wide_fraction) width *= config.wide_factor;
    const double candidate = propose(current, width, state.rng);
    const double candidate_weight = log_site_weight_at(path, i, candidate, params);
    const double log_ratio = candidate_weight - current_weight;
    if (log_ratio >= 0.0 || uniform01(state.rng) < std::exp(log_ratio)) {
      current = candidate;
      current_weight = candidate_weight;
      ++accepted;
    }
  }
  path[i] = current;
  state.accepted += accepted;
  state.proposed += hits;
  return accepted;
}

}  // namespace

std::uint64_t derive_chain_seed(std::uint64_t master_seed, std::uint64_t chain_id) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(chain_id + 0x632be59bd9b4e019ULL));
}

double propose(double q, double delta, Rng& rng) {
  return q + delta * (2.0 * uniform01(rng) - 1.0);
}

bool metropolis_site_update(ChainState& state, std::size_t i, const SimParams& params,
                            const SamplerConfig& config) {
  return site_hits(state, i, 1, params, config) == 1;
}

double sweep(ChainState& state, const SimParams& params, const SamplerConfig& config) {
  const std::size_t n = state.path.size();
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    accepted += site_hits(state, i, config.hits_per_site, params, config);
  }
  ++state.sweep_index;
  return static_cast<double>(accepted) / static_cast<double>(n * config.hits_per_site);
}

double thermalize(ChainState& state, const SimParams& params, const SamplerConfig& config,
                  const std::function<void(const ChainState&)>& on_sweep) {
  const std::size_t tuning_sweeps = config.tuning_enabled ? config.therm_sweeps / 2 : 0;
  for (std::size_t s = 0; s < config.therm_sweeps; ++s) {
    const double rate = advance(state, params, config);
    if (s < tuning_sweeps) {
      state.delta *= std::exp(rate - config.target_acceptance);
    }
    if (on_sweep) on_sweep(state);
  }
  return state.delta;
}

double translation_half_width(const SimParams& params) {
  const double k = params.mass() * params.omega() * params.omega();
  if (!(k > 0.0)) return 0.0;
  return 3.0 / std::sqrt(params.beta() * k);
}

bool translation_update(ChainState& state, const SimParams& params) {
  const double width = translation_half_width(params);
  if (width == 0.0) return false;
  ++state.shifts_proposed;
  const double shift = propose(0.0, width, state.rng);
  double delta_v = 0.0;
  for (double q : state.path.sites()) delta_v += potential(q + shift, params) - potential(q, params);
  const double log_ratio = -params.time_step() * delta_v;
  if (log_ratio >= 0.0 || uniform01(state.rng) < std::exp(log_ratio)) {
    for (double& q : state.path.sites()) q += shift;
    ++state.shifts_accepted;
    return true;
  }
  return false;
}

double advance(ChainState& state, const SimParams& params, const SamplerConfig& config) {
  const double rate = sweep(state, params, config);
  if (config.translation_moves) translation_update(state, params);
  return rate;
}

ChainState make_chain(const SimParams& params, const SamplerConfig& config,
                      std::size_t chain_id) {
  const std::uint64_t seed = derive_chain_seed(config.seed, chain_id);
  ChainState state(Path(params.n_slices()), seed, config.proposal_half_width);
  if (config.start == StartMode::kHot) {
    const double m = params.mass();
    const double w = params.omega();
    double window = config.proposal_half_width;
    if (w > 0.0) window = std::min(1.0 / std::sqrt(m * w), 1.0 / std::cbrt(m * w * w));
    for (double& q : state.path.sites()) q = window * (2.0 * uniform01(state.rng) - 1.0);
  }
  return state;
}

double ChainSummary::mean_tuned_delta() const {
  if (chains.empty()) return 0.0;
  double sum = 0.0;
  for (const ChainInfo& c : chains) sum += c.tuned_delta;
  return sum / static_cast<double>(chains.size());
}

ChainSummary run_chain(const SimParams& params, const SamplerConfig& config,
                       const SweepObserver& observer, std::size_t jobs) {
  config.validate();
  const std::size_t n_chains = config.n_paths;
  ChainSummary summary;
  summary.chains.resize(n_chains);

  std::atomic<std::size_t> next_chain{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t k = next_chain.fetch_add(1); k < n_chains; k = next_chain.fetch_add(1)) {
        ChainState state = make_chain(params, config, k);
        ChainInfo& info = summary.chains[k];
        info.chain_id = k;
        info.seed = derive_chain_seed(config.seed, k);
        info.tuned_delta = thermalize(state, params, config);
        if (state.proposed > 0) {
          info.thermalization_acceptance =
              static_cast<double>(state.accepted) / static_cast<double>(state.proposed);
        }
        state.accepted = 0;
        state.proposed = 0;
        state.shifts_accepted = 0;
        state.shifts_proposed = 0;
        for (std::size_t s = 0; s < config.n_sweeps; ++s) {
          advance(state, params, config);
          if (observer) observer(SweepRecord{k, s, state.path});
        }
        info.accepted = state.accepted;
        info.proposed = state.proposed;
        info.shifts_accepted = state.shifts_accepted;
        info.shifts_proposed = state.shifts_proposed;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_chain.store(n_chains);
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(jobs, 1, n_chains);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const ChainInfo& c : summary.chains) {
    summary.accepted += c.accepted;
    summary.proposed += c.proposed;
  }
  return summary;
}

}  // namespace relosc
