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

#include "relosc/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <ostream>
#include <thread>

#include "relosc/cli/output.hpp"
#include "relosc/errors.hpp"
#include "relosc/fits.hpp"
#include "relosc/oracles.hpp"

namespace relosc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

json load_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void log_summary(std::ostream& log, const ExperimentSummary& s) {
  for (const ScalarEstimate& e : s.scalars) {
    log << "  " << e.name << " = " << format_double(e.mean) << " +- " << format_double(e.std_error)
        << (e.plateau_found ? "" : "  (no blocking plateau)") << "\n";
  }
  if (s.correlation_fit) {
    log << "  correlation fit: a = " << format_double(s.correlation_fit->value("a")) << " +- "
        << format_double(s.correlation_fit->error("a")) << ", b = " << format_double(s.correlation_fit->value("b"))
        << " +- " << format_double(s.correlation_fit->error("b")) << "\n";
  }
  if (s.density_fit) {
    log << "  density fit: a = " << format_double(s.density_fit->value("a")) << " +- "
        << format_double(s.density_fit->error("a")) << ", b = " << format_double(s.density_fit->value("b"))
        << " +- " << format_double(s.density_fit->error("b")) << "\n";
  }
}

}  // namespace

ExperimentSummary run_to_directory(const ExperimentConfig& config, const fs::path& dir, std::size_t jobs,
                                   std::ostream& log) {
  ensure_directory(dir);
  const SimParams& p = config.params;
  if (!p.ground_state_dominated()) {
    log << "warning: beta * estimated gap = " << format_double(p.beta() * p.estimated_gap())
        << " < 5; ground-state formulas may not apply\n";
  }
  log << "run: m = " << format_double(p.mass()) << ", omega = " << format_double(p.omega())
      << ", tau = " << format_double(p.time_step()) << ", n_t = " << p.n_slices() << ", "
      << config.sampler.n_paths << " chains x " << config.sampler.n_sweeps << " sweeps -> " << dir.string()
      << "\n";
  const EnsembleData data = run_experiment(p, config.sampler, config.measurement, jobs);
  const ExperimentSummary summary = analyze(data);
  const std::string hash = config_hash(config);

  const MeasurementConfig& m = config.measurement;
  if (m.energy) {
    write_atomic(dir / "kinetic.csv", series_csv(data, Observable::kKinetic, hash));
    write_atomic(dir / "potential.csv", series_csv(data, Observable::kPotential, hash));
    write_atomic(dir / "energy.csv", series_csv(data, Observable::kEnergy, hash));
  }
  if (m.q2) write_atomic(dir / "q2.csv", series_csv(data, Observable::kQ2, hash));
  if (summary.density) write_atomic(dir / "histogram.csv", histogram_csv(*summary.density, hash));
  if (summary.correlation) write_atomic(dir / "correlation.csv", correlation_csv(*summary.correlation, hash));
  write_atomic(dir / "summary.json", dump(run_summary_json(config, data, summary)));
  write_atomic(dir / "metadata.json", dump(run_metadata_json(config, data)));
  log_summary(log, summary);
  return summary;
}

void scan_to_directory(const ExperimentConfig& config, const fs::path& dir, std::size_t jobs, std::ostream& log) {
  if (!config.scan || config.scan->values.empty()) throw ValidationError("scan: config has no [scan] values");
  ensure_directory(dir);
  const std::string hash = config_hash(config);
  std::string table = "# config_hash=" + hash + "\nscan_value,observable,mean,error\n";
  json points = json::array();
  for (std::size_t i = 0; i < config.scan->values.size(); ++i) {
    const double value = config.scan->values[i];
    const ExperimentConfig point = scan_point(config, value);
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    run_to_directory(point, dir / name, jobs, log);
    const json summary = load_json(dir / name / "summary.json");
    for (const auto& [obs, ve] : summary["observables"].items()) {
      table += format_double(value) + ',' + obs + ',' + format_double(ve["value"].get<double>()) + ',' +
               format_double(ve["error"].get<double>()) + '\n';
    }
    points.push_back({{"directory", name}, {"value", value}, {"config_hash", config_hash(point)}});
  }
  write_atomic(dir / "scan.csv", table);
  write_atomic(dir / "scan.json", dump(json{{"config_hash", hash},
                                            {"config", serialize_config(config, false)},
                                            {"variable", std::string(to_string(config.scan->variable))},
                                            {"points", points}}));
}

json oracle_to_directory(const OracleRequest& req, const fs::path& dir, std::ostream& log) {
  oracles::OracleReport report;
  if (req.regime == "sho") {
    report = oracles::sho_oracle(req.mass, req.omega);
  } else if (req.regime == "ultra") {
    report = oracles::ultra_oracle(req.mass, req.omega);
  } else if (req.regime == "grid") {
    const double p_max = req.p_max.value_or(oracles::default_p_max(req.mass, req.omega));
    const oracles::GridSpectrum g = oracles::grid_diagonalize(req.mass, req.omega, p_max, req.grid_points);
    report = g.report;
    log << "grid: E0 = " << format_double(g.eigenvalues[0]) << " at n = " << g.n_points << ", "
        << format_double(g.eigenvalues_doubled[0]) << " at n = " << 2 * g.n_points
        << " (relative change " << format_double(g.relative_change) << ")\n";
  } else {
    throw ValidationError("oracle: regime must be sho, ultra or grid, got '" + req.regime + "'");
  }
  for (const std::string& w : report.warnings) log << "warning: " << w << "\n";
  ensure_directory(dir);
  const json doc = oracle_json(report);
  const std::string hash = doc["physics_hash"].get<std::string>();
  write_atomic(dir / ("oracle_" + req.regime + ".json"), dump(doc));
  write_atomic(dir / ("oracle_" + req.regime + "_density.csv"), oracle_density_csv(report, hash));
  return doc;
}

std::string Comparison::table() const {
  std::string out = "observable,simulated,simulated_error,reference,reference_error,difference,z,pass\n";
  for (const ComparisonRow& r : rows) {
    out += r.observable + ',' + format_double(r.simulated) + ',' + format_double(r.simulated_error) + ',' +
           format_double(r.reference) + ',' + format_double(r.reference_error) + ',' + format_double(r.difference) +
           ',' + format_double(r.z) + ',' + (r.pass ? "true" : "false") + '\n';
  }
  return out;
}

Comparison compare(const fs::path& run, const fs::path& reference, double tolerance, bool force) {
  const fs::path run_file = fs::is_directory(run) ? run / "summary.json" : run;
  const json sim = load_json(run_file);
  const json ref = load_json(reference);
  for (const json* doc : {&sim, &ref}) {
    if (!doc->contains("schema") || (*doc)["schema"] != kObservableSchema || !doc->contains("observables")) {
      throw std::runtime_error("compare: input is not a '" + std::string(kObservableSchema) + "' document");
    }
  }
  if (sim.value("physics_hash", "") != ref.value("physics_hash", "") && !force) {
    throw HashMismatch("compare: physics hashes differ (" + sim.value("physics_hash", "?") + " vs " +
                       ref.value("physics_hash", "?") + "); use --force to compare anyway");
  }
  Comparison out;
  for (const auto& [name, r] : ref["observables"].items()) {
    if (!sim["observables"].contains(name)) continue;
    const json& s = sim["observables"][name];
    ComparisonRow row;
    row.observable = name;
    row.simulated = s["value"].get<double>();
    row.simulated_error = s["error"].get<double>();
    row.reference = r["value"].get<double>();
    row.reference_error = r["error"].get<double>();
    row.difference = row.simulated - row.reference;
    const double sigma = std::hypot(row.simulated_error, row.reference_error);
    if (sigma > 0.0) {
      row.z = row.difference / sigma;
    } else {
      row.z = row.difference == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), row.difference);
    }
    row.pass = std::abs(row.z) <= tolerance;
    out.pass = out.pass && row.pass;
    out.rows.push_back(row);
  }
  if (out.rows.empty()) throw std::runtime_error("compare: no observables in common");
  return out;
}

json fit_file(const FitRequest& req) {
  const CsvTable t = read_csv(req.input);
  struct Select {
    std::size_t x, y;
    std::optional<std::size_t> sigma, x_right;
  } sel{};
  std::optional<std::size_t> filter;
  if (t.has("scan_value")) {
    if (req.observable.empty()) throw ValidationError("fit: scan tables need --observable");
    sel = {t.column("scan_value"), t.column("mean"), t.column("error"), std::nullopt};
    filter = t.column("observable");
  } else if (t.has("bin_left")) {
    sel = {t.column("bin_left"), t.column("mass"), t.column("error"), t.column("bin_right")};
  } else if (t.has("lag")) {
    sel = {t.column("lag"), t.column("value"), t.column("error"), std::nullopt};
  } else if (t.has("sweep_index")) {
    sel = {t.column("sweep_index"), t.column("value"), std::nullopt, std::nullopt};
  } else {
    sel = {t.column("x"), t.column("y"), t.has("sigma") ? std::optional(t.column("sigma")) : std::nullopt,
           std::nullopt};
  }
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("fit: not a number '" + s + "' in " + req.input.string());
  };

  std::vector<fits::DataPoint> pts;
  for (const auto& row : t.rows) {
    if (filter && row[*filter] != req.observable) continue;
    double x = number(row[sel.x]);
    if (sel.x_right) x = 0.5 * (x + number(row[*sel.x_right]));
    x *= req.x_scale;
    if (req.x_min && x < *req.x_min) continue;
    if (req.x_max && x > *req.x_max) continue;
    pts.push_back({x, number(row[sel.y]), sel.sigma ? number(row[*sel.sigma]) : 0.0});
  }
  const bool any_sigma = std::any_of(pts.begin(), pts.end(), [](const auto& p) { return p.sigma > 0.0; });
  const bool nonlinear = req.model == "exponential" || req.model == "gaussian";
  std::size_t dropped = 0;
  if (nonlinear || any_sigma) {
    const auto before = pts.size();
    std::erase_if(pts, [](const auto& p) { return !(p.sigma > 0.0); });
    dropped = before - pts.size();
  }
  if (pts.empty()) throw ValidationError("fit: no usable points in " + req.input.string());

  fits::FitResult fit;
  if (req.model == "exponential") fit = fits::fit_exponential(pts);
  else if (req.model == "gaussian") fit = fits::fit_gaussian(pts);
  else if (req.model == "constant") fit = fits::fit_constant(pts);
  else if (req.model == "power") fit = fits::fit_power(pts, req.exponent, req.scale);
  else throw ValidationError("fit: model must be exponential, gaussian, constant or power");

  json j = fit_json(fit);
  j["input"] = req.input.string();
  j["input_config_hash"] = t.config_hash;
  j["dropped_points"] = dropped;
  j["x_scale"] = req.x_scale;
  if (!req.observable.empty()) j["observable"] = req.observable;
  if (req.model == "power") {
    j["exponent"] = req.exponent;
    j["scale"] = req.scale;
  }
  return j;
}

namespace {

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentConfig load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                     const std::string& out) {
  ExperimentConfig c = load_config(path);
  if (seed) c.sampler.seed = *seed;
  if (!out.empty()) c.output_dir = out;
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path-integral Monte Carlo for the relativistic oscillator", "relosc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RELOSC_VERSION);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t jobs = default_jobs();

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "Master seed (overrides the config)");
    cmd->add_option("--out", out_dir, "Output directory (overrides [output] dir)");
    cmd->add_option("--jobs", jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  };
  CLI::App* run = app.add_subcommand("run", "Run one simulation and write its artifacts");
  add_run_flags(run);
  CLI::App* scan = app.add_subcommand("scan", "Run every point of the [scan] axis");
  add_run_flags(scan);

  OracleRequest oracle_req;
  std::string oracle_config;
  std::optional<double> oracle_m, oracle_w;
  CLI::App* oracle = app.add_subcommand("oracle", "Write a reference report (sho, ultra or grid)");
  oracle->add_option("--regime", oracle_req.regime, "sho | ultra | grid")
      ->required()
      ->check(CLI::IsMember({"sho", "ultra", "grid"}));
  oracle->add_option("--config", oracle_config, "Take m and omega from this config")->check(CLI::ExistingFile);
  oracle->add_option("--m", oracle_m, "Mass");
  oracle->add_option("--omega", oracle_w, "Frequency");
  oracle->add_option("--n-points", oracle_req.grid_points, "Grid points (grid regime)");
  oracle->add_option("--p-max", oracle_req.p_max, "Momentum cutoff (grid regime)");
  oracle->add_option("--out", out_dir, "Output directory")->required();

  std::string compare_run, compare_ref;
  double tolerance = 3.0;
  bool force = false;
  CLI::App* cmp = app.add_subcommand("compare", "Compare a run against a reference document");
  cmp->add_option("run", compare_run, "Run directory or summary.json")->required()->check(CLI::ExistingPath);
  cmp->add_option("reference", compare_ref, "Oracle or summary JSON")->required()->check(CLI::ExistingFile);
  cmp->add_option("--tolerance", tolerance, "Allowed |difference| in combined standard errors");
  cmp->add_flag("--force", force, "Compare even when the physics hashes differ");
  cmp->add_option("--out", out_dir, "Also write the table to this CSV file");

  FitRequest fit_req;
  std::string exponent_text = "-1";
  std::string fit_input;
  CLI::App* fit = app.add_subcommand("fit", "Fit a model to a CSV written by run or scan");
  fit->add_option("--model", fit_req.model, "exponential | gaussian | constant | power")
      ->required()
      ->check(CLI::IsMember({"exponential", "gaussian", "constant", "power"}));
  fit->add_option("--input", fit_input, "CSV file")->required()->check(CLI::ExistingFile);
  fit->add_option("--observable", fit_req.observable, "Row filter for scan tables");
  fit->add_option("--exponent", exponent_text, "Fixed exponent of the power model, e.g. -1 or -4/3");
  fit->add_option("--scale", fit_req.scale, "Fixed prefactor of the power model");
  fit->add_option("--x-scale", fit_req.x_scale, "Multiplier applied to x (e.g. tau for lags)");
  fit->add_option("--x-min", fit_req.x_min, "Drop points below this x");
  fit->add_option("--x-max", fit_req.x_max, "Drop points above this x");
  fit->add_option("--out", out_dir, "Write the result JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << RELOSC_VERSION << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "relosc: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (run->parsed()) {
      const ExperimentConfig c = load_with_overrides(config_path, seed, out_dir);
      run_to_directory(c, c.output_dir, jobs, err);
    } else if (scan->parsed()) {
      const ExperimentConfig c = load_with_overrides(config_path, seed, out_dir);
      scan_to_directory(c, c.output_dir, jobs, err);
    } else if (oracle->parsed()) {
      if (!oracle_config.empty()) {
        const ExperimentConfig c = load_config(oracle_config);
        oracle_req.mass = c.params.mass();
        oracle_req.omega = c.params.omega();
      }
      if (oracle_m) oracle_req.mass = *oracle_m;
      if (oracle_w) oracle_req.omega = *oracle_w;
      if (oracle_config.empty() && (!oracle_m || !oracle_w)) {
        throw ValidationError("oracle: give --config or both --m and --omega");
      }
      const json doc = oracle_to_directory(oracle_req, out_dir, err);
      out << dump(doc);
    } else if (cmp->parsed()) {
      const Comparison c = compare(compare_run, compare_ref, tolerance, force);
      out << c.table();
      if (!out_dir.empty()) write_atomic(out_dir, c.table());
      if (!c.pass) {
        err << "compare: at least one observable differs by more than " << format_double(tolerance) << " sigma\n";
        return kComparisonFailure;
      }
    } else if (fit->parsed()) {
      fit_req.input = fit_input;
      try {
        fit_req.exponent = fits::parse_rational(exponent_text);
      } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("--exponent: ") + e.what());
      }
      const std::string text = dump(fit_file(fit_req));
      if (out_dir.empty()) {
        out << text;
      } else {
        write_atomic(out_dir, text);
      }
    }
  } catch (const HashMismatch& e) {
    err << "relosc: " << e.what() << "\n";
    return kComparisonFailure;
  } catch (const ValidationError& e) {
    err << "relosc: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "relosc: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kSuccess;
}

}  // namespace relosc::cli
