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

#include "relosc/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "relosc/oracles.hpp"

namespace relosc::cli {
namespace {

using boost::property_tree::ptree;

constexpr int kAutoHistogramBins = 200;
constexpr double kAutoHistogramSigmas = 8.0;

// One [section]: typed lookups that remember which keys were consumed.
// "value   ; note" -> "value"; ';' or '#' only starts a comment after blanks
std::string strip_comment(std::string v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((v[i] == ';' || v[i] == '#') && (v[i - 1] == ' ' || v[i - 1] == '\t')) {
      v.erase(i);
      break;
    }
  }
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.pop_back();
  return v;
}

class Section {
 public:
  Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return strip_comment(it->second.data());
  }

  std::string required(const std::string& key) {
    auto v = raw(key);
    if (!v) fail(key, "required key missing");
    return *v;
  }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto v = raw(key);
    if (!v) {
      if (!fallback) fail(key, "required key missing");
      return *fallback;
    }
    return parse_real(key, *v);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) fail(key, "expected a non-negative integer, got '" + *v + "'");
    return out;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1" || *v == "on") return true;
    if (*v == "false" || *v == "no" || *v == "0" || *v == "off") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  double parse_real(const std::string& key, const std::string& text) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail(key, "expected a number, got '" + text + "'");
    return out;
  }

  void reject_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!used_.count(key)) fail(key, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + what);
  }

 private:
  std::string name_;
  const ptree* tree_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"physics", "sampler",  "observables", "histogram",
                                         "scan",    "analysis", "output"};

std::vector<double> parse_list(Section& s, const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) s.fail(key, "empty list entry");
    out.push_back(s.parse_real(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) s.fail(key, "empty list");
  return out;
}

template <class F>
auto rethrow_with_context(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

void append(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += " = ";
  out += value;
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string_view to_string(ScanVariable v) { return v == ScanVariable::kMass ? "m" : "omega"; }

std::vector<double> log_spaced(double from, double to, int per_decade) {
  if (!(from > 0.0 && to > from) || per_decade < 1) {
    throw ConfigError("[scan] from/to/per_decade: need 0 < from < to and per_decade >= 1");
  }
  const double decades = std::log10(to / from);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * per_decade - 1e-9)));
  std::vector<double> out;
  for (int k = 0; k <= steps; ++k) out.push_back(from * std::pow(to / from, static_cast<double>(k) / steps));
  out.back() = to;
  return out;
}

void resolve_histogram(ExperimentConfig& config) {
  if (!config.histogram_auto) return;
  const double m = config.params.mass();
  const double w = config.params.omega();
  double half = 1.0;
  if (w > 0.0) {
    const double q2 = w < m ? oracles::sho_oracle(m, w).q_squared
                            : 2.0 * oracles::ultra_lambda0() / (3.0 * std::pow(m * w * w, 2.0 / 3.0));
    half = kAutoHistogramSigmas * std::sqrt(q2);
  }
  config.measurement.histogram_q_min = -half;
  config.measurement.histogram_q_max = half;
  config.measurement.histogram_bin_width = 2.0 * half / kAutoHistogramBins;
}

ExperimentConfig parse_config(const std::string& text) {
  ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [name, child] : tree) {
    if (child.empty()) throw ConfigError("key '" + name + "' outside of any [section]");
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  auto section = [&](const std::string& name) {
    auto it = tree.find(name);
    return Section(name, it == tree.not_found() ? nullptr : &it->second);
  };

  ExperimentConfig c;
  Section physics = section("physics");
  const double m = physics.real("m");
  const double omega = physics.real("omega");
  const double tau = physics.real("tau");
  const std::uint64_t n_t = physics.integer("n_t", 0);
  if (!physics.raw("n_t")) physics.fail("n_t", "required key missing");
  physics.reject_unknown();
  c.params = rethrow_with_context("[physics]", [&] { return SimParams(m, omega, tau, n_t); });

  Section sampler = section("sampler");
  SamplerConfig& s = c.sampler;
  s.n_paths = sampler.integer("n_paths", 10);
  s.n_sweeps = sampler.integer("n_sweeps", 1000);
  s.hits_per_site = sampler.integer("n_hits", 10);
  s.seed = sampler.integer("seed", 1);
  s.therm_sweeps = sampler.integer("therm_sweeps", 500);
  s.proposal_half_width = sampler.real("delta", tau);
  s.tuning_enabled = sampler.boolean("tuning", true);
  if (auto v = sampler.raw("start")) {
    if (*v == "cold") s.start = StartMode::kCold;
    else if (*v == "hot") s.start = StartMode::kHot;
    else sampler.fail("start", "expected cold or hot, got '" + *v + "'");
  }
  if (auto v = sampler.raw("proposal")) {
    if (*v == "mixture") s.proposal = ProposalKind::kMixture;
    else if (*v == "uniform") s.proposal = ProposalKind::kUniform;
    else sampler.fail("proposal", "expected mixture or uniform, got '" + *v + "'");
  }
  s.wide_fraction = sampler.real("wide_fraction", 0.1);
  s.wide_factor = sampler.real("wide_factor", 10.0);
  s.translation_moves = sampler.boolean("translation", true);
  sampler.reject_unknown();
  rethrow_with_context("[sampler]", [&] { s.validate(); return 0; });

  Section obs = section("observables");
  MeasurementConfig& mc = c.measurement;
  mc.energy = obs.boolean("energy", true);
  mc.q2 = obs.boolean("q2", true);
  mc.density = obs.boolean("density", true);
  mc.correlation = obs.boolean("correlation", true);
  mc.correlation_subtract_mean = obs.boolean("correlation_subtract_mean", false);
  obs.reject_unknown();

  Section hist = section("histogram");
  const auto h = hist.raw("h");
  if (!h || *h == "auto") {
    c.histogram_auto = true;
    if (hist.raw("q_min") || hist.raw("q_max")) hist.fail("q_min", "q_min/q_max need an explicit h");
  } else {
    c.histogram_auto = false;
    mc.histogram_bin_width = hist.parse_real("h", *h);
    mc.histogram_q_min = hist.real("q_min");
    mc.histogram_q_max = hist.real("q_max");
  }
  hist.reject_unknown();

  Section analysis = section("analysis");
  mc.segments_per_chain = analysis.integer("segments", 10);
  analysis.reject_unknown();
  resolve_histogram(c);
  rethrow_with_context("[histogram]", [&] { mc.validate(); return 0; });

  Section scan = section("scan");
  if (scan.present()) {
    ScanAxis axis;
    const std::string var = scan.required("variable");
    if (var == "m") axis.variable = ScanVariable::kMass;
    else if (var == "omega") axis.variable = ScanVariable::kOmega;
    else scan.fail("variable", "expected m or omega, got '" + var + "'");
    const auto values = scan.raw("values");
    const auto from = scan.raw("from");
    if (values && from) scan.fail("values", "give either values or from/to, not both");
    if (values) {
      axis.values = parse_list(scan, "values", *values);
    } else {
      const double lo = scan.real("from");
      const double hi = scan.real("to");
      const auto per = scan.integer("per_decade", 5);
      axis.values = log_spaced(lo, hi, static_cast<int>(per));
    }
    for (double v : axis.values) {
      rethrow_with_context("[scan] values", [&] {
        return axis.variable == ScanVariable::kMass ? c.params.with_mass(v) : c.params.with_omega(v);
      });
    }
    scan.reject_unknown();
    c.scan = std::move(axis);
  }

  Section output = section("output");
  if (auto dir = output.raw("dir")) c.output_dir = *dir;
  output.reject_unknown();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string serialize_without_output(const ExperimentConfig& c) {
  std::string out;
  out += "[physics]\n";
  append(out, "m", format_double(c.params.mass()));
  append(out, "omega", format_double(c.params.omega()));
  append(out, "tau", format_double(c.params.time_step()));
  append(out, "n_t", std::to_string(c.params.n_slices()));
  const SamplerConfig& s = c.sampler;
  out += "\n[sampler]\n";
  append(out, "n_paths", std::to_string(s.n_paths));
  append(out, "n_sweeps", std::to_string(s.n_sweeps));
  append(out, "n_hits", std::to_string(s.hits_per_site));
  append(out, "seed", std::to_string(s.seed));
  append(out, "therm_sweeps", std::to_string(s.therm_sweeps));
  append(out, "delta", format_double(s.proposal_half_width));
  append(out, "tuning", s.tuning_enabled ? "true" : "false");
  append(out, "start", std::string(relosc::to_string(s.start)));
  append(out, "proposal", std::string(relosc::to_string(s.proposal)));
  append(out, "wide_fraction", format_double(s.wide_fraction));
  append(out, "wide_factor", format_double(s.wide_factor));
  append(out, "translation", s.translation_moves ? "true" : "false");
  const MeasurementConfig& m = c.measurement;
  out += "\n[observables]\n";
  append(out, "energy", m.energy ? "true" : "false");
  append(out, "q2", m.q2 ? "true" : "false");
  append(out, "density", m.density ? "true" : "false");
  append(out, "correlation", m.correlation ? "true" : "false");
  append(out, "correlation_subtract_mean", m.correlation_subtract_mean ? "true" : "false");
  out += "\n[histogram]\n";
  if (c.histogram_auto) {
    append(out, "h", "auto");
  } else {
    append(out, "h", format_double(m.histogram_bin_width));
    append(out, "q_min", format_double(m.histogram_q_min));
    append(out, "q_max", format_double(m.histogram_q_max));
  }
  out += "\n[analysis]\n";
  append(out, "segments", std::to_string(m.segments_per_chain));
  if (c.scan) {
    out += "\n[scan]\n";
    append(out, "variable", std::string(to_string(c.scan->variable)));
    std::string list;
    for (std::size_t i = 0; i < c.scan->values.size(); ++i) {
      if (i) list += ", ";
      list += format_double(c.scan->values[i]);
    }
    append(out, "values", list);
  }
  return out;
}

std::string fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config, bool with_output) {
  std::string out = serialize_without_output(config);
  if (!with_output) return out;
  out += "\n[output]\n";
  append(out, "dir", config.output_dir);
  return out;
}

std::string config_hash(const ExperimentConfig& config) { return fnv1a(serialize_without_output(config)); }

std::string physics_hash(double mass, double omega) {
  return fnv1a("m = " + format_double(mass) + "\nomega = " + format_double(omega) + "\n");
}

ExperimentConfig scan_point(const ExperimentConfig& config, double value) {
  ExperimentConfig c = config;
  c.params = config.scan && config.scan->variable == ScanVariable::kOmega ? config.params.with_omega(value)
                                                                          : config.params.with_mass(value);
  c.scan.reset();
  resolve_histogram(c);
  return c;
}

}  // namespace relosc::cli
