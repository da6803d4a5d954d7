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

#include "relosc/cli/output.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

#ifndef RELOSC_VERSION
#define RELOSC_VERSION "unknown"
#endif

namespace relosc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string hash_line(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

json value_error(double value, double error) { return json{{"value", value}, {"error", error}}; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string series_csv(const EnsembleData& data, Observable o, const std::string& hash) {
  const ObservableSeries s = series(data, o);
  std::string out = hash_line(hash) + "sweep_index,chain_id,value\n";
  for (std::size_t c = 0; c < s.n_chains(); ++c) {
    const auto values = s.chain(c);
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += std::to_string(i);
      out += ',';
      out += std::to_string(c);
      out += ',';
      out += format_double(values[i]);
      out += '\n';
    }
  }
  return out;
}

std::string histogram_csv(const HistogramDensity& h, const std::string& hash) {
  std::string out = hash_line(hash) + "bin_left,bin_right,mass,error\n";
  for (std::size_t b = 0; b < h.n_bins(); ++b) {
    out += format_double(h.bin_left(b)) + ',' + format_double(h.bin_right(b)) + ',' +
           format_double(h.masses[b]) + ',' + format_double(h.errors.empty() ? 0.0 : h.errors[b]) + '\n';
  }
  return out;
}

std::string correlation_csv(const CorrelationSeries& c, const std::string& hash) {
  std::string out = hash_line(hash) + "lag,value,error\n";
  for (std::size_t n = 0; n < c.n_lags(); ++n) {
    out += std::to_string(n) + ',' + format_double(c.values[n]) + ',' +
           format_double(c.errors.empty() ? 0.0 : c.errors[n]) + '\n';
  }
  return out;
}

json fit_json(const fits::FitResult& fit) {
  json params = json::object();
  for (const fits::FitParameter& p : fit.parameters) params[p.name] = value_error(p.value, p.std_error);
  return json{{"model", fit.model},
              {"parameters", params},
              {"chi_squared", fit.chi_squared},
              {"chi_squared_per_dof", fit.chi_squared_per_dof},
              {"n_points", fit.n_points},
              {"weighted", fit.weighted},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"diagnostics", fit.diagnostics}};
}

json run_summary_json(const ExperimentConfig& config, const EnsembleData& data, const ExperimentSummary& summary) {
  const SimParams& p = config.params;
  json observables = json::object();
  json blocking = json::object();
  for (const ScalarEstimate& e : summary.scalars) {
    observables[e.name] = value_error(e.mean, e.std_error);
    blocking[e.name] = {{"plateau_block_size", e.plateau_block_size}, {"plateau_found", e.plateau_found}};
    if (e.name == "kinetic") observables["kinetic_minus_m"] = value_error(e.mean - p.mass(), e.std_error);
  }
  json fitted = json::object();
  if (summary.correlation_fit) {
    const fits::FitResult& f = *summary.correlation_fit;
    observables["correlation_amplitude"] = value_error(f.value("a"), f.error("a"));
    observables["correlation_rate"] = value_error(f.value("b"), f.error("b"));
    fitted["correlation"] = fit_json(f);
    fitted["correlation"]["window_lags"] = {summary.correlation_fit_window.first, summary.correlation_fit_window.last};
  }
  if (summary.density_fit) {
    const fits::FitResult& f = *summary.density_fit;
    observables["density_amplitude"] = value_error(f.value("a"), f.error("a"));
    observables["density_width"] = value_error(f.value("b"), f.error("b"));
    fitted["density"] = fit_json(f);
    fitted["density"]["window_bins"] = {summary.density_fit_window.first, summary.density_fit_window.last};
  }
  json warnings = json::array();
  if (!p.ground_state_dominated()) {
    warnings.push_back("beta * estimated gap = " + format_double(p.beta() * p.estimated_gap()) +
                       " < 5; ground-state formulas may not apply");
  }
  json j{{"schema", kObservableSchema},
         {"source", "run"},
         {"regime", "pimc"},
         {"config_hash", config_hash(config)},
         {"physics_hash", physics_hash(p.mass(), p.omega())},
         {"params", {{"m", p.mass()}, {"omega", p.omega()}, {"tau", p.time_step()}, {"n_t", p.n_slices()},
                     {"beta", p.beta()}}},
         {"observables", observables},
         {"blocking", blocking},
         {"fits", fitted},
         {"jackknife_units", summary.jackknife_units},
         {"acceptance", data.chain_summary.acceptance()},
         {"warnings", warnings}};
  if (summary.density) {
    j["histogram"] = {{"total_samples", summary.density->total_samples},
                      {"out_of_range", summary.density->out_of_range}};
  }
  return j;
}

json run_metadata_json(const ExperimentConfig& config, const EnsembleData& data) {
  json chains = json::array();
  for (const ChainInfo& c : data.chain_summary.chains) {
    chains.push_back({{"chain_id", c.chain_id},
                      {"seed", c.seed},
                      {"tuned_delta", c.tuned_delta},
                      {"thermalization_acceptance", c.thermalization_acceptance},
                      {"acceptance", c.acceptance()},
                      {"translation_acceptance", c.translation_acceptance()}});
  }
  return json{{"code_version", RELOSC_VERSION},
              {"config", serialize_config(config, false)},
              {"config_hash", config_hash(config)},
              {"physics_hash", physics_hash(config.params.mass(), config.params.omega())},
              {"seed", config.sampler.seed},
              {"rng", "mt19937_64, per-chain seed splitmix64(master, chain)"},
              {"start", std::string(relosc::to_string(config.sampler.start))},
              {"proposal", std::string(relosc::to_string(config.sampler.proposal))},
              {"translation_moves", config.sampler.translation_moves},
              {"translation_half_width", translation_half_width(config.params)},
              {"thermalization_sweeps", config.sampler.therm_sweeps},
              {"tuning_sweeps", config.sampler.tuning_enabled ? config.sampler.therm_sweeps / 2 : 0},
              {"mean_tuned_delta", data.chain_summary.mean_tuned_delta()},
              {"chains", chains}};
}

json oracle_json(const oracles::OracleReport& r) {
  json observables{{"energy", value_error(r.ground_energy, 0.0)},
                   {"kinetic", value_error(r.kinetic, 0.0)},
                   {"kinetic_minus_m", value_error(r.kinetic - r.mass, 0.0)},
                   {"potential", value_error(r.potential, 0.0)},
                   {"q2", value_error(r.q_squared, 0.0)},
                   {"gap", value_error(r.gap, 0.0)},
                   {"correlation_amplitude", value_error(r.correlation_amplitude, 0.0)},
                   {"correlation_rate", value_error(r.correlation_rate, 0.0)}};
  json diagnostics = json::object();
  for (const auto& [k, v] : r.diagnostics) diagnostics[k] = v;
  if (r.regime == "sho") {
    const double b = r.mass * r.omega;
    observables["density_width"] = value_error(b, 0.0);
    observables["density_amplitude"] = value_error(std::sqrt(b / std::numbers::pi), 0.0);
  }
  return json{{"schema", kObservableSchema},
              {"source", "oracle"},
              {"regime", r.regime},
              {"physics_hash", physics_hash(r.mass, r.omega)},
              {"params", {{"m", r.mass}, {"omega", r.omega}}},
              {"observables", observables},
              {"diagnostics", diagnostics},
              {"warnings", r.warnings}};
}

std::string oracle_density_csv(const oracles::OracleReport& r, const std::string& hash) {
  std::string out = hash_line(hash) + "q,rho\n";
  for (const oracles::DensityPoint& d : r.density) out += format_double(d.q) + ',' + format_double(d.rho) + '\n';
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::runtime_error("csv: no column '" + name + "'");
}

bool CsvTable::has(const std::string& name) const {
  for (const std::string& c : columns) {
    if (c == name) return true;
  }
  return false;
}

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (line.rfind(key, 0) == 0) t.config_hash = line.substr(key.size());
      continue;
    }
    auto fields = split(line, ',');
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(t.columns.size()) + " fields");
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.columns.empty()) throw std::runtime_error(path.string() + ": no header line");
  return t;
}

}  // namespace relosc::cli
