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

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "relosc/estimators.hpp"
#include "relosc/model.hpp"
#include "relosc/sampler.hpp"
#include "relosc/specfun.hpp"

using namespace relosc;

namespace {

std::vector<double> geometric_points(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return x;
}

void BM_LogBesselK1(benchmark::State& state) {
  const std::vector<double> xs = geometric_points(state.range(0) * 1e-3, state.range(1) * 1e-3, 1024);
  for (auto _ : state) {
    double s = 0.0;
    for (double x : xs) s += specfun::log_bessel_k1(x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
// small, series, Chebyshev pieces and tail
BENCHMARK(BM_LogBesselK1)->Args({1, 1000})->Args({2000, 25000})->Args({25000, 700000});

void BM_BesselKRatio(benchmark::State& state) {
  const std::vector<double> xs = geometric_points(1e-3, 700.0, 1024);
  for (auto _ : state) {
    double s = 0.0;
    for (double x : xs) s += specfun::bessel_k_ratio(x);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_BesselKRatio);

void BM_LogKineticKernel(benchmark::State& state) {
  // m = 100 at tau = 0.1 and m = 0.1 at tau = 0.01
  const SimParams p = state.range(0) == 0 ? SimParams(100.0, 1.0, 0.1, 100) : SimParams(0.1, 100.0, 0.01, 1000);
  const std::vector<double> dq = geometric_points(1e-4, 0.3, 1024);
  for (auto _ : state) {
    double s = 0.0;
    for (double d : dq) s += log_kinetic_kernel(d, p);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dq.size()));
}
BENCHMARK(BM_LogKineticKernel)->Arg(0)->Arg(1);

void BM_Sweep(benchmark::State& state) {
  const SimParams p = state.range(0) == 0 ? SimParams(100.0, 1.0, 0.1, 100) : SimParams(0.1, 100.0, 0.01, 1000);
  SamplerConfig cfg;
  cfg.proposal_half_width = p.time_step();
  cfg.therm_sweeps = 100;
  ChainState chain = make_chain(p, cfg, 0);
  thermalize(chain, p, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(chain, p, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.n_slices() * cfg.hits_per_site));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_KineticEstimate(benchmark::State& state) {
  const SimParams p(100.0, 1.0, 0.1, 100);
  SamplerConfig cfg;
  cfg.proposal_half_width = 0.1;
  ChainState chain = make_chain(p, cfg, 0);
  thermalize(chain, p, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(kinetic_estimate(chain.path, p));
}
BENCHMARK(BM_KineticEstimate);

}  // namespace

BENCHMARK_MAIN();
