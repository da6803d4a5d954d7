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

// Serialization of run artifacts. Every CSV starts with a comment line
// "# config_hash=<hash>" followed by a one-line header. JSON documents that
// carry observables share one schema so runs and oracles compare field by
// field.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relosc/cli/config.hpp"
#include "relosc/experiment.hpp"
#include "relosc/fits.hpp"
#include "relosc/oracles.hpp"

namespace relosc::cli {

inline constexpr const char* kObservableSchema = "relosc.observables/1";

/// Writes `content` to a temporary file next to `path` and renames it into
/// place. Throws std::runtime_error naming the path on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

std::string series_csv(const EnsembleData& data, Observable o, const std::string& hash);
std::string histogram_csv(const HistogramDensity& h, const std::string& hash);
std::string correlation_csv(const CorrelationSeries& c, const std::string& hash);

nlohmann::json fit_json(const fits::FitResult& fit);

/// Observable document for a simulation run.
nlohmann::json run_summary_json(const ExperimentConfig& config, const EnsembleData& data,
                                const ExperimentSummary& summary);

/// Reproducibility record: canonical config, seeds, tuned widths, version.
nlohmann::json run_metadata_json(const ExperimentConfig& config, const EnsembleData& data);

/// Observable document for an oracle report.
nlohmann::json oracle_json(const oracles::OracleReport& report);

std::string oracle_density_csv(const oracles::OracleReport& report, const std::string& hash);

/// Deterministic text form of a JSON document (sorted keys, 2-space indent).
std::string dump(const nlohmann::json& j);

/// Numeric table read back from any CSV written here.
struct CsvTable {
  std::string config_hash;  // empty when the comment line is absent
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::runtime_error if the column is missing.
  std::size_t column(const std::string& name) const;
  bool has(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace relosc::cli
