// SPDX-License-Identifier: Apache-2.0
//
// holobeam: joint holographic / baseband beamformer design library
// Copyright (C) 2026 The holobeam developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "holobeam/algorithms.hpp"
#include "holobeam/channel.hpp"

namespace holobeam {

// Scenario configuration: a key-per-line text format with [section] headers.
// Unknown keys are hard errors (silent typos corrupt sweeps); validation
// reports every violation, not just the first. The full schema is documented
// in the repository README.

class ConfigParseError : public Error {
 public:
  using Error::Error;
};

class ConfigValidationError : public Error {
 public:
  ConfigValidationError(const std::string& what, std::vector<std::string> issues_in)
      : Error(what), issues(std::move(issues_in)) {}
  std::vector<std::string> issues;
};

struct GeometryConfig {
  int elements_per_side = 0;  // M, required
  int feeds = 0;              // K, required
  Real spacing_wavelengths = 0.25;
  Real refractive_index = 1.7320508075688772;
  std::string feed_layout = "line";
};

struct ChannelConfig {
  int users = 0;  // required
  ChannelParams params;
};

struct PenalizedConfig {
  Real penalty_stop = 1e-2;
  Real objective_tol = 1e-3;  // stabilization part of the stop rule
  Real penalty_growth = 1.2;
  Real penalty_trigger = 0.9;
  int max_outer = 2000;
  Real bisection_tol = 1e-8;
  Real rho_floor = 1e-3;
};

struct MaxMinConfig {
  Real objective_tol = 1e-3;
  int max_outer = 500;
  Real inner_tol = 1e-10;
};

struct ExperimentConfig {
  std::vector<std::string> algorithms = {"mm", "sr", "smm"};
  std::vector<std::uint64_t> seeds;
  std::vector<Real> powers_dbm = {16, 18, 20, 22, 24};
  std::vector<Real> c_grid = {1.0, 0.5, 0.1};
  std::string output_dir = "holobeam_out";
  int threads = 0;  // 0 = hardware concurrency
};

struct ScenarioConfig {
  GeometryConfig geometry;
  ChannelConfig channel;
  MaxMinConfig mm;
  PenalizedConfig sr;
  PenalizedConfig smm;
  ExperimentConfig experiment;

  RhsGeometry make_geometry() const {
    const Real lambda = channel.params.wavelength();
    return RhsGeometry::make(geometry.elements_per_side, geometry.feeds,
                             geometry.spacing_wavelengths * lambda, lambda,
                             geometry.refractive_index);
  }
};

inline Real dbm_to_watts(Real dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

using KeyValues = std::map<std::string, std::pair<std::string, int>>;  // key -> (value, line)

inline KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigParseError("line " + std::to_string(line_no) +
                               ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigParseError("line " + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigParseError("line " + std::to_string(line_no) +
                             ": expected key = value, got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigParseError("line " + std::to_string(line_no) + ": empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) {
      throw ConfigParseError("line " + std::to_string(line_no) + ": duplicate key '" +
                             full + "'");
    }
    kv[full] = {value, line_no};
  }
  return kv;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

}  // namespace detail

/// "1..20" expands the inclusive range; otherwise a comma-separated list.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  const auto dots = s.find("..");
  std::vector<std::uint64_t> seeds;
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(detail::trim(s.substr(0, dots)));
    const std::uint64_t hi = std::stoull(detail::trim(s.substr(dots + 2)));
    if (hi < lo) throw InvalidArgumentError("seed range is reversed: " + s);
    for (std::uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
    return seeds;
  }
  for (const auto& tok : detail::split_list(s)) seeds.push_back(std::stoull(tok));
  return seeds;
}

inline std::vector<Real> parse_real_list(const std::string& s) {
  std::vector<Real> out;
  for (const auto& tok : detail::split_list(s)) out.push_back(std::stod(tok));
  return out;
}

/// Parse + validate a scenario from config text. Collects every validation
/// problem before throwing.
inline ScenarioConfig parse_scenario(const std::string& text) {
  auto kv = detail::parse_key_values(text);
  ScenarioConfig cfg;
  std::vector<std::string> issues;

  auto consume = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string value = it->second.first;
    kv.erase(it);
    return value;
  };
  auto take_int = [&](const std::string& key, int& dst) {
    if (auto v = consume(key)) {
      try {
        dst = std::stoi(*v);
      } catch (const std::exception&) {
        issues.push_back(key + ": expected an integer, got '" + *v + "'");
      }
    }
  };
  auto take_real = [&](const std::string& key, Real& dst) {
    if (auto v = consume(key)) {
      try {
        dst = std::stod(*v);
      } catch (const std::exception&) {
        issues.push_back(key + ": expected a number, got '" + *v + "'");
      }
    }
  };
  auto require = [&](const std::string& key, bool ok) {
    if (!ok) issues.push_back(key + ": required key is missing or invalid");
  };

  take_int("geometry.M", cfg.geometry.elements_per_side);
  take_int("geometry.K", cfg.geometry.feeds);
  take_real("geometry.spacing_wavelengths", cfg.geometry.spacing_wavelengths);
  take_real("geometry.refractive_index", cfg.geometry.refractive_index);
  if (auto v = consume("geometry.feed_layout")) cfg.geometry.feed_layout = *v;

  take_int("channel.users", cfg.channel.users);
  take_int("channel.rx_antennas", cfg.channel.params.rx_antennas);
  take_real("channel.carrier_freq_hz", cfg.channel.params.carrier_freq_hz);
  take_real("channel.bandwidth_hz", cfg.channel.params.bandwidth_hz);
  take_real("channel.noise_density_dbm_hz", cfg.channel.params.noise_density_dbm_hz);
  take_int("channel.paths", cfg.channel.params.path_count);
  take_real("channel.cell_radius_m", cfg.channel.params.cell_radius_m);
  take_real("channel.bs_height_m", cfg.channel.params.bs_height_m);
  take_real("channel.ue_height_m", cfg.channel.params.ue_height_m);
  take_real("channel.min_distance_m", cfg.channel.params.min_distance_m);
  take_real("channel.rx_spacing_m", cfg.channel.params.rx_spacing_m);

  take_real("mm.objective_tol", cfg.mm.objective_tol);
  take_int("mm.max_outer", cfg.mm.max_outer);
  take_real("mm.inner_tol", cfg.mm.inner_tol);

  for (auto* block : {&cfg.sr, &cfg.smm}) {
    const std::string name = block == &cfg.sr ? "sr" : "smm";
    take_real(name + ".penalty_stop", block->penalty_stop);
    take_real(name + ".objective_tol", block->objective_tol);
    take_real(name + ".penalty_growth", block->penalty_growth);
    take_real(name + ".penalty_trigger", block->penalty_trigger);
    take_int(name + ".max_outer", block->max_outer);
    take_real(name + ".bisection_tol", block->bisection_tol);
    take_real(name + ".rho_floor", block->rho_floor);
  }

  if (auto v = consume("experiment.algorithms")) {
    cfg.experiment.algorithms.clear();
    for (const auto& tok : detail::split_list(*v)) {
      if (tok == "all") {
        cfg.experiment.algorithms = {"mm", "sr", "smm"};
        break;
      }
      if (tok != "mm" && tok != "sr" && tok != "smm") {
        issues.push_back("experiment.algorithms: unknown algorithm '" + tok + "'");
        continue;
      }
      cfg.experiment.algorithms.push_back(tok);
    }
  }
  if (auto v = consume("experiment.seeds")) {
    try {
      cfg.experiment.seeds = parse_seed_list(*v);
    } catch (const std::exception& e) {
      issues.push_back(std::string("experiment.seeds: ") + e.what());
    }
  }
  if (cfg.experiment.seeds.empty()) {
    for (std::uint64_t s = 1; s <= 20; ++s) cfg.experiment.seeds.push_back(s);
  }
  if (auto v = consume("experiment.power_dbm")) {
    try {
      cfg.experiment.powers_dbm = parse_real_list(*v);
    } catch (const std::exception& e) {
      issues.push_back(std::string("experiment.power_dbm: ") + e.what());
    }
  }
  if (auto v = consume("experiment.c_grid")) {
    try {
      cfg.experiment.c_grid = parse_real_list(*v);
    } catch (const std::exception& e) {
      issues.push_back(std::string("experiment.c_grid: ") + e.what());
    }
  }
  if (auto v = consume("experiment.output_dir")) cfg.experiment.output_dir = *v;
  take_int("experiment.threads", cfg.experiment.threads);

  for (const auto& [key, value] : kv) {
    issues.push_back(key + ": unknown key (line " + std::to_string(value.second) + ")");
  }

  require("geometry.M", cfg.geometry.elements_per_side >= 1);
  require("geometry.K", cfg.geometry.feeds >= 1);
  require("channel.users", cfg.channel.users >= 1);
  if (cfg.geometry.feed_layout != "line") {
    issues.push_back("geometry.feed_layout: only 'line' is supported");
  }
  if (cfg.channel.params.rx_antennas < 1) {
    issues.push_back("channel.rx_antennas: must be >= 1");
  }
  if (!(cfg.geometry.spacing_wavelengths > 0.0)) {
    issues.push_back("geometry.spacing_wavelengths: must be > 0");
  }
  if (cfg.channel.params.path_count < 1) issues.push_back("channel.paths: must be >= 1");
  if (!(cfg.channel.params.carrier_freq_hz > 0.0)) {
    issues.push_back("channel.carrier_freq_hz: must be > 0");
  }
  if (!(cfg.channel.params.bandwidth_hz > 0.0)) {
    issues.push_back("channel.bandwidth_hz: must be > 0");
  }
  if (!(cfg.channel.params.cell_radius_m > cfg.channel.params.min_distance_m)) {
    issues.push_back("channel.cell_radius_m: must exceed channel.min_distance_m");
  }
  if (cfg.experiment.powers_dbm.empty()) {
    issues.push_back("experiment.power_dbm: power sweep must be nonempty");
  }
  for (Real p : cfg.experiment.powers_dbm) {
    if (!std::isfinite(p) || p <= 0.0) {
      issues.push_back("experiment.power_dbm: entries must be positive and finite");
      break;
    }
  }
  for (Real c : cfg.experiment.c_grid) {
    if (!(c > 0.0) || c > 1.0) {
      issues.push_back("experiment.c_grid: entries must lie in (0, 1]");
    }
  }
  if (cfg.experiment.algorithms.empty()) {
    issues.push_back("experiment.algorithms: must name at least one algorithm");
  }
  for (auto check : {std::pair{cfg.mm.objective_tol, "mm.objective_tol"},
                     std::pair{cfg.mm.inner_tol, "mm.inner_tol"},
                     std::pair{cfg.sr.penalty_stop, "sr.penalty_stop"},
                     std::pair{cfg.smm.penalty_stop, "smm.penalty_stop"}}) {
    if (!(check.first > 0.0)) {
      issues.push_back(std::string(check.second) + ": must be > 0");
    }
  }

  if (!issues.empty()) {
    std::string msg = "configuration has " + std::to_string(issues.size()) + " problem(s):";
    for (const auto& issue : issues) msg += "\n  - " + issue;
    throw ConfigValidationError(msg, issues);
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigParseError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

/// Command-line values that take precedence over the file.
struct CliOverrides {
  std::optional<std::string> algo;
  std::optional<std::string> seeds;
  std::optional<std::string> powers_dbm;
  std::optional<std::string> c_grid;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
};

inline void apply_overrides(ScenarioConfig& cfg, const CliOverrides& cli) {
  if (cli.algo) {
    if (*cli.algo == "all") {
      cfg.experiment.algorithms = {"mm", "sr", "smm"};
    } else {
      for (const auto& tok : detail::split_list(*cli.algo)) {
        if (tok != "mm" && tok != "sr" && tok != "smm") {
          throw InvalidArgumentError("--algo: unknown algorithm '" + tok + "'");
        }
      }
      cfg.experiment.algorithms = detail::split_list(*cli.algo);
    }
  }
  if (cli.seeds) cfg.experiment.seeds = parse_seed_list(*cli.seeds);
  if (cli.powers_dbm) cfg.experiment.powers_dbm = parse_real_list(*cli.powers_dbm);
  if (cli.c_grid) cfg.experiment.c_grid = parse_real_list(*cli.c_grid);
  if (cli.output_dir) cfg.experiment.output_dir = *cli.output_dir;
  if (cli.threads) cfg.experiment.threads = *cli.threads;
}

}  // namespace holobeam
