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

// Metropolis sampling of closed paths.
//
// Each chain owns its Path and its generator. Sites are visited in order and
// receive `hits_per_site` proposals per sweep. Proposals are symmetric so the
// acceptance probability is min(1, pi(q')/pi(q)). The proposal width is tuned
// during the first half of thermalization only and is frozen afterwards.
// Single-site moves relax the path centroid slowly, so by default every sweep
// is followed by one whole-path translation move.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "relosc/model.hpp"

namespace relosc {

enum class StartMode { kCold, kHot };
enum class ProposalKind { kUniform, kMixture };

std::string_view to_string(StartMode mode);
std::string_view to_string(ProposalKind kind);

struct SamplerConfig {
  std::size_t n_paths = 1;
  std::size_t n_sweeps = 1000;
  std::size_t hits_per_site = 10;
  double proposal_half_width = 0.1;
  std::size_t therm_sweeps = 500;
  std::uint64_t seed = 1;
  bool tuning_enabled = true;
  StartMode start = StartMode::kCold;
  ProposalKind proposal = ProposalKind::kMixture;
  /// Mixture proposal: probability of a wide move and its width multiplier.
  double wide_fraction = 0.1;
  double wide_factor = 10.0;
  double target_acceptance = 0.5;
  /// One extra move per sweep shifting the whole path by a common amount.
  bool translation_moves = true;

  void validate() const;
};

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Seed of chain `chain_id` derived from the master seed.
std::uint64_t derive_chain_seed(std::uint64_t master_seed, std::uint64_t chain_id);

struct ChainState {
  Path path;
  Rng rng;
  double delta = 0.1;
  std::size_t sweep_index = 0;
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
  std::uint64_t shifts_accepted = 0;
  std::uint64_t shifts_proposed = 0;

  ChainState(Path initial, std::uint64_t seed, double half_width)
      : path(std::move(initial)), rng(seed), delta(half_width) {}
};

/// q + u with u uniform on [-delta, delta].
double propose(double q, double delta, Rng& rng);

/// One proposal/accept step at site i (honours the mixture setting).
bool metropolis_site_update(ChainState& state, std::size_t i, const SimParams& params,
                            const SamplerConfig& config);

/// Visits every site in order with config.hits_per_site hits each; returns
/// the acceptance fraction of this sweep.
double sweep(ChainState& state, const SimParams& params, const SamplerConfig& config);

/// Half-width of the translation proposal: three standard deviations of the
/// path centroid in the potential alone, 1/sqrt(beta m w^2). Zero for w = 0,
/// where a translation changes nothing.
double translation_half_width(const SimParams& params);

/// Metropolis move q_i -> q_i + e for all i with e uniform on
/// [-translation_half_width, translation_half_width]. The kinetic links are
/// unchanged, so only the potential enters the acceptance.
bool translation_update(ChainState& state, const SimParams& params);

/// sweep() followed by one translation_update when config.translation_moves
/// is set; returns the sweep's acceptance fraction.
double advance(ChainState& state, const SimParams& params, const SamplerConfig& config);

/// Runs config.therm_sweeps calls of advance(). With tuning enabled the width is adapted
/// toward the target acceptance for the first half and then frozen. The
/// optional callback sees the state after every thermalization sweep.
double thermalize(ChainState& state, const SimParams& params, const SamplerConfig& config,
                  const std::function<void(const ChainState&)>& on_sweep = {});

ChainState make_chain(const SimParams& params, const SamplerConfig& config,
                      std::size_t chain_id);

struct SweepRecord {
  std::size_t chain_id;
  std::size_t sweep_index;  // 0-based among measurement sweeps
  const Path& path;
};

/// Called after every measurement sweep. Calls for one chain are sequential
/// on one thread; calls for different chains may run concurrently.
using SweepObserver = std::function<void(const SweepRecord&)>;

struct ChainInfo {
  std::size_t chain_id = 0;
  std::uint64_t seed = 0;
  double tuned_delta = 0.0;
  double thermalization_acceptance = 0.0;
  std::uint64_t accepted = 0;  // measurement sweeps only
  std::uint64_t proposed = 0;
  std::uint64_t shifts_accepted = 0;
  std::uint64_t shifts_proposed = 0;

  double acceptance() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  double translation_acceptance() const {
    return shifts_proposed == 0 ? 0.0 : static_cast<double>(shifts_accepted) / static_cast<double>(shifts_proposed);
  }
};

struct ChainSummary {
  std::vector<ChainInfo> chains;  // ordered by chain id
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;

  double acceptance() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  double mean_tuned_delta() const;
};

/// Runs config.n_paths independent chains on up to `jobs` worker threads.
/// Results do not depend on `jobs`.
ChainSummary run_chain(const SimParams& params, const SamplerConfig& config,
                       const SweepObserver& observer, std::size_t jobs = 1);

}  // namespace relosc
