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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "holobeam/config.hpp"

namespace holobeam {

// Experiment driver: expands the configured (algorithm, seed, power, c) grid
// into cells, runs them on a worker pool, and writes one summary CSV, one
// trace CSV per cell and a JSON manifest. Within a seed, every algorithm
// consumes the identical channel set and initial point.

inline constexpr Real kZeroRateThresholdNats = 0.01;

struct SummaryRow {
  std::string algorithm;
  std::uint64_t seed = 0;
  Real p_dbm = 0.0;
  Real c = 1.0;
  Real min_rate_nats = 0.0;
  Real sum_rate_nats = 0.0;
  int zero_rate_ue_count = 0;
  int iterations = 0;
  Real wall_ms = 0.0;
  bool success = false;
  std::string error;
};

inline void compute_metrics(const BasebandSet& w, const RealMat& x,
                            const ChannelSet& channels, SummaryRow& row) {
  const auto rates = user_rates(w, x, channels);
  row.min_rate_nats = *std::min_element(rates.begin(), rates.end());
  row.sum_rate_nats = 0.0;
  row.zero_rate_ue_count = 0;
  for (Real r : rates) {
    row.sum_rate_nats += r;
    if (r < kZeroRateThresholdNats) ++row.zero_rate_ue_count;
  }
}

namespace detail {

inline std::string format_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 1099511628211ULL;
  }
  return hash;
}

inline int log_level() {
  const char* env = std::getenv("HOLOBEAM_LOG");
  if (!env) return 1;
  const std::string v(env);
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

inline std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "iter,objective,min_rate_nats,sum_rate_nats,penalty,rho,wall_ms\n";
  for (const auto& p : trace.points) {
    out += std::to_string(p.iter) + "," + format_real(p.objective) + "," +
           format_real(p.min_rate) + "," + format_real(p.sum_rate) + "," +
           format_real(p.penalty) + "," + format_real(p.rho) + "," +
           format_real(p.wall_ms) + "\n";
  }
  return out;
}

}  // namespace detail

struct ExperimentCell {
  std::string algorithm;
  std::uint64_t seed = 0;
  Real p_dbm = 0.0;
  Real c = 1.0;  // meaningful for smm only; fixed at 1 otherwise

  std::string key() const {
    std::string k = algorithm + "_seed" + std::to_string(seed) + "_p" +
                    detail::format_real(p_dbm) + "dbm";
    if (algorithm == "smm") k += "_c" + detail::format_real(c);
    return k;
  }
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  int failures = 0;
  std::filesystem::path output_dir;
};

/// Expand the configured grid. SMM multiplies over the c grid; MM and SR run
/// once per (seed, power).
inline std::vector<ExperimentCell> expand_cells(const ScenarioConfig& cfg) {
  std::vector<ExperimentCell> cells;
  for (const auto& algo : cfg.experiment.algorithms) {
    for (std::uint64_t seed : cfg.experiment.seeds) {
      for (Real p : cfg.experiment.powers_dbm) {
        if (algo == "smm") {
          for (Real c : cfg.experiment.c_grid) cells.push_back({algo, seed, p, c});
        } else {
          cells.push_back({algo, seed, p, 1.0});
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) {
    return std::tie(a.algorithm, a.seed, a.p_dbm, a.c) <
           std::tie(b.algorithm, b.seed, b.p_dbm, b.c);
  });
  return cells;
}

/// Per-seed shared inputs: one channel set and one base initial point reused
/// by every algorithm (the precoders are rescaled per power level).
struct SeedContext {
  ChannelSet channels;
  AmplitudeBounds bounds;
  InitPoint base_init;  // W scaled to 1 W; X and chi are power-independent

  InitPoint init_for_power(Real budget_watts) const {
    InitPoint p = base_init;
    for (auto& w_nu : p.W) w_nu *= std::sqrt(budget_watts);
    return p;
  }
};

inline SeedContext make_seed_context(const ScenarioConfig& cfg, std::uint64_t seed) {
  SeedContext ctx;
  const RhsGeometry geom = cfg.make_geometry();
  ctx.channels = sample_channel_set(seed, cfg.channel.params, geom, cfg.channel.users);
  ctx.bounds = init_amplitude_bounds(geom, los_directions(ctx.channels));
  Rng init_rng = Rng(seed).fork(0);
  ctx.base_init = init_point(ctx.bounds, cfg.geometry.feeds,
                             cfg.channel.params.rx_antennas, cfg.channel.users, 1.0,
                             init_rng);
  return ctx;
}

inline AlgorithmConfig make_algorithm_config(const ScenarioConfig& cfg,
                                             const std::string& algo, Real p_watts,
                                             Real c) {
  AlgorithmConfig a;
  a.power_budget_watts = p_watts;
  a.c = c;
  if (algo == "mm") {
    a.mm_objective_tol = cfg.mm.objective_tol;
    a.max_outer_mm = cfg.mm.max_outer;
    a.inner_tol = cfg.mm.inner_tol;
  } else {
    const PenalizedConfig& p = algo == "sr" ? cfg.sr : cfg.smm;
    a.penalty_stop = p.penalty_stop;
    a.objective_stabilize_tol = p.objective_tol;
    a.penalty_growth = p.penalty_growth;
    a.penalty_trigger = p.penalty_trigger;
    a.max_outer_penalized = p.max_outer;
    a.bisection_tol = p.bisection_tol;
    a.rho_floor = p.rho_floor;
  }
  return a;
}

inline RunResult run_cell(const ScenarioConfig& cfg, const ExperimentCell& cell,
                          const SeedContext& ctx) {
  const Real p_watts = dbm_to_watts(cell.p_dbm);
  const AlgorithmConfig algo_cfg = make_algorithm_config(cfg, cell.algorithm, p_watts,
                                                         cell.c);
  const InitPoint init = ctx.init_for_power(p_watts);
  if (cell.algorithm == "mm") return run_mm(ctx.channels, ctx.bounds, algo_cfg, init);
  if (cell.algorithm == "sr") return run_sr(ctx.channels, ctx.bounds, algo_cfg, init);
  return run_smm(ctx.channels, ctx.bounds, algo_cfg, init);
}

/// Run every configured cell on a worker pool, write outputs, and return the
/// (deterministically ordered) summary. Cell failures are recorded in their
/// summary rows; the run continues.
inline ExperimentResult run_experiment(const ScenarioConfig& cfg,
                                       const std::string& config_text = "") {
  namespace fs = std::filesystem;
  const int log = detail::log_level();
  ExperimentResult result;
  result.output_dir = cfg.experiment.output_dir;
  fs::create_directories(result.output_dir);

  const std::vector<ExperimentCell> cells = expand_cells(cfg);
  result.rows.resize(cells.size());

  // Seed contexts are shared read-only across the pool.
  std::map<std::uint64_t, SeedContext> contexts;
  std::map<std::uint64_t, std::uint64_t> channel_hashes;
  for (std::uint64_t seed : cfg.experiment.seeds) {
    contexts.emplace(seed, make_seed_context(cfg, seed));
    const std::string dump = channel_set_to_json(contexts.at(seed).channels).dump(2);
    channel_hashes[seed] = detail::fnv1a(dump);
    detail::atomic_write(result.output_dir / ("channel_seed" + std::to_string(seed) +
                                              ".json"),
                         dump);
  }

  unsigned threads = cfg.experiment.threads > 0
                         ? static_cast<unsigned>(cfg.experiment.threads)
                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, cells.size() ? cells.size() : 1);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const ExperimentCell& cell = cells[idx];
      SummaryRow row;
      row.algorithm = cell.algorithm;
      row.seed = cell.seed;
      row.p_dbm = cell.p_dbm;
      row.c = cell.c;
      try {
        const RunResult run = run_cell(cfg, cell, contexts.at(cell.seed));
        compute_metrics(run.W, run.X, contexts.at(cell.seed).channels, row);
        row.iterations = static_cast<int>(run.trace.points.size()) - 1;
        row.wall_ms = run.trace.points.empty() ? 0.0 : run.trace.points.back().wall_ms;
        row.success = true;
        detail::atomic_write(result.output_dir / ("trace_" + cell.key() + ".csv"),
                             detail::trace_to_csv(run.trace));
        if (log >= 2) {
          std::cerr << "[holobeam] cell " << cell.key() << " done, min rate "
                    << row.min_rate_nats << " nats\n";
        }
      } catch (const std::exception& e) {
        row.success = false;
        row.error = e.what();
        if (log >= 1) {
          std::cerr << "[holobeam] cell " << cell.key() << " FAILED: " << e.what()
                    << "\n";
        }
      }
      result.rows[idx] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (const auto& row : result.rows) {
    if (!row.success) ++result.failures;
  }

  std::string csv =
      "algorithm,seed,p_dbm,c,min_rate_nats,sum_rate_nats,min_rate_bps_hz,"
      "sum_rate_bps_hz,zero_rate_ue_count,iterations,success,error,wall_ms\n";
  const Real ln2 = std::log(2.0);
  for (const auto& r : result.rows) {
    csv += r.algorithm + "," + std::to_string(r.seed) + "," +
           detail::format_real(r.p_dbm) + "," + detail::format_real(r.c) + "," +
           detail::format_real(r.min_rate_nats) + "," +
           detail::format_real(r.sum_rate_nats) + "," +
           detail::format_real(r.min_rate_nats / ln2) + "," +
           detail::format_real(r.sum_rate_nats / ln2) + "," +
           std::to_string(r.zero_rate_ue_count) + "," + std::to_string(r.iterations) +
           "," + (r.success ? "1" : "0") + "," + r.error + "," +
           detail::format_real(r.wall_ms) + "\n";
  }
  detail::atomic_write(result.output_dir / "summary.csv", csv);

  nlohmann::json manifest;
  manifest["library"] = "holobeam 0.1.0";
  manifest["config_hash"] = detail::fnv1a(config_text);
  manifest["cells"] = nlohmann::json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    manifest["cells"].push_back({{"key", cells[i].key()},
                                 {"channel_hash", channel_hashes.at(cells[i].seed)},
                                 {"success", result.rows[i].success}});
  }
  detail::atomic_write(result.output_dir / "manifest.json", manifest.dump(2));
  return result;
}

}  // namespace holobeam
