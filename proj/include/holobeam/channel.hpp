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
#include <utility>
#include <vector>

#include <json.hpp>

#include "holobeam/common.hpp"
#include "holobeam/rhs_model.hpp"

namespace holobeam {

// Seeded mmWave clustered channel generation. Users are dropped uniformly in
// a disc around the BS, each link is a sum of L planar-wave paths with
// CN(0,1) gains and uniform departure/arrival angles.

struct ChannelParams {
  Real carrier_freq_hz = 28e9;
  Real bandwidth_hz = 100e6;
  Real noise_density_dbm_hz = -174.0;
  int path_count = 15;  // L
  Real cell_radius_m = 150.0;
  Real bs_height_m = 10.0;
  Real ue_height_m = 1.5;
  Real min_distance_m = 10.0;  // horizontal floor, keeps path loss finite
  int rx_antennas = 1;         // D
  Real rx_spacing_m = 0.0;     // 0 -> lambda/2

  Real wavelength() const { return 299792458.0 / carrier_freq_hz; }

  Real rx_spacing() const {
    return rx_spacing_m > 0.0 ? rx_spacing_m : 0.5 * wavelength();
  }

  Real noise_power_watts() const {
    const Real dbm = noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
    return std::pow(10.0, (dbm - 30.0) / 10.0);
  }
};

struct UserGeometry {
  Real x = 0.0;
  Real y = 0.0;
  Real distance = 0.0;   // 3D BS-to-UE distance
  Real theta_los = 0.0;  // polar angle off the array normal
  Real phi_los = 0.0;    // azimuth
};

struct ChannelSet {
  std::vector<Mat> H;  // per user, D x M^2
  Real sigma = 0.0;    // noise power, watts
  std::vector<UserGeometry> users;
  std::uint64_t seed = 0;
};

/// 53.22 + 35.3 log10(d), in dB.
inline Real path_loss_db(Real distance_m) {
  if (!(distance_m > 0.0)) {
    throw NonPositiveDistanceError("path_loss_db: distance must be > 0");
  }
  return 53.22 + 35.3 * std::log10(distance_m);
}

/// Unit-norm transmit response of the M x M grid; entry for element (m, m')
/// has phase (2 pi / lambda) d_s [(m-1) cos(phi) sin(theta) + (m'-1) sin(phi) sin(theta)],
/// ordered column-major over the grid like the amplitude matrices.
inline Vec array_response_tx(const RhsGeometry& geom, Real phi_t, Real theta_t) {
  const int m_side = geom.elements_per_side;
  const Real coef = 2.0 * kPi / geom.wavelength * geom.element_spacing;
  const Real cx = std::cos(phi_t) * std::sin(theta_t);
  const Real cy = std::sin(phi_t) * std::sin(theta_t);
  Vec a(geom.element_count());
  for (int mp = 0; mp < m_side; ++mp) {
    for (int m = 0; m < m_side; ++m) {
      a(geom.element_index(m, mp)) = std::polar(1.0, coef * (m * cx + mp * cy));
    }
  }
  return a / std::sqrt(static_cast<Real>(geom.element_count()));
}

/// Unit-norm receive response of a D-element line array with spacing d_u.
inline Vec array_response_rx(int antennas, Real spacing, Real wavelength, Real phi_r) {
  if (antennas < 1) {
    throw InvalidArgumentError("array_response_rx: need at least one antenna");
  }
  const Real step = 2.0 * kPi / wavelength * spacing * std::sin(phi_r);
  Vec a(antennas);
  for (int i = 0; i < antennas; ++i) a(i) = std::polar(1.0, step * i);
  return a / std::sqrt(static_cast<Real>(antennas));
}

struct PathComponent {
  Complex gain;     // alpha ~ CN(0,1)
  Real aod_az = 0;  // phi^t in [0, 2 pi)
  Real aod_el = 0;  // theta^t in [-pi/2, pi/2)
  Real aoa_az = 0;  // phi^r in [0, 2 pi)
};

/// H = sqrt(10^(-beta/10)) sqrt(M^2 D / L) sum_l alpha_l a_r a_t^H.
inline Mat assemble_channel(const RhsGeometry& geom, const ChannelParams& params,
                            const std::vector<PathComponent>& paths, Real beta_db) {
  const int d = params.rx_antennas;
  Mat h = Mat::Zero(d, geom.element_count());
  for (const auto& path : paths) {
    const Vec ar = array_response_rx(d, params.rx_spacing(), geom.wavelength, path.aoa_az);
    const Vec at = array_response_tx(geom, path.aod_az, path.aod_el);
    h.noalias() += path.gain * (ar * at.adjoint());
  }
  const Real gain = std::sqrt(std::pow(10.0, -beta_db / 10.0)) *
                    std::sqrt(static_cast<Real>(geom.element_count()) * d /
                              static_cast<Real>(paths.size()));
  return gain * h;
}

/// Drop one user uniformly in the cell disc (with the horizontal floor) and
/// record its line-of-sight direction as seen from the BS.
inline UserGeometry sample_user_geometry(Rng& rng, const ChannelParams& params) {
  const Real r_min = params.min_distance_m;
  const Real r_max = params.cell_radius_m;
  const Real u = rng.uniform();
  const Real radius = std::sqrt(r_min * r_min + u * (r_max * r_max - r_min * r_min));
  const Real angle = rng.uniform(0.0, 2.0 * kPi);
  UserGeometry g;
  g.x = radius * std::cos(angle);
  g.y = radius * std::sin(angle);
  const Real dz = params.bs_height_m - params.ue_height_m;
  g.distance = std::sqrt(radius * radius + dz * dz);
  g.phi_los = angle;
  g.theta_los = std::atan2(radius, std::abs(dz) > 0.0 ? std::abs(dz) : 1e-9);
  if (g.theta_los >= 0.5 * kPi) g.theta_los = std::nextafter(0.5 * kPi, 0.0);
  return g;
}

/// Seeded generation of all users' channels. Per-user substreams keep the
/// result independent of user count ordering effects.
inline ChannelSet sample_channel_set(std::uint64_t seed, const ChannelParams& params,
                                     const RhsGeometry& geom, int num_users) {
  if (num_users < 1) {
    throw InvalidArgumentError("sample_channel_set: need at least one user");
  }
  ChannelSet set;
  set.seed = seed;
  set.sigma = params.noise_power_watts();
  Rng root(seed);
  for (int nu = 0; nu < num_users; ++nu) {
    Rng user_rng = root.fork(static_cast<std::uint64_t>(nu) + 1);
    UserGeometry ug = sample_user_geometry(user_rng, params);
    std::vector<PathComponent> paths(params.path_count);
    for (int l = 0; l < params.path_count; ++l) {
      Rng path_rng = user_rng.fork(static_cast<std::uint64_t>(l) + 1);
      paths[l].gain = path_rng.cnormal();
      paths[l].aod_az = path_rng.uniform(0.0, 2.0 * kPi);
      paths[l].aod_el = path_rng.uniform(-0.5 * kPi, 0.5 * kPi);
      paths[l].aoa_az = path_rng.uniform(0.0, 2.0 * kPi);
    }
    set.users.push_back(ug);
    set.H.push_back(assemble_channel(geom, params, paths, path_loss_db(ug.distance)));
  }
  return set;
}

inline std::vector<std::pair<Real, Real>> los_directions(const ChannelSet& set) {
  std::vector<std::pair<Real, Real>> dirs;
  dirs.reserve(set.users.size());
  for (const auto& u : set.users) dirs.emplace_back(u.theta_los, u.phi_los);
  return dirs;
}

// ---------------------------------------------------------------------------
// Replay dump: dims, seed, and complex entries as interleaved re/im pairs in
// column-major order.
// ---------------------------------------------------------------------------

inline nlohmann::json channel_set_to_json(const ChannelSet& set) {
  nlohmann::json j;
  j["seed"] = set.seed;
  j["sigma"] = set.sigma;
  j["users"] = nlohmann::json::array();
  for (std::size_t nu = 0; nu < set.H.size(); ++nu) {
    nlohmann::json ju;
    ju["rows"] = set.H[nu].rows();
    ju["cols"] = set.H[nu].cols();
    std::vector<Real> flat;
    flat.reserve(2 * set.H[nu].size());
    for (Eigen::Index c = 0; c < set.H[nu].cols(); ++c) {
      for (Eigen::Index r = 0; r < set.H[nu].rows(); ++r) {
        flat.push_back(set.H[nu](r, c).real());
        flat.push_back(set.H[nu](r, c).imag());
      }
    }
    ju["entries"] = std::move(flat);
    ju["x"] = set.users[nu].x;
    ju["y"] = set.users[nu].y;
    ju["distance"] = set.users[nu].distance;
    ju["theta_los"] = set.users[nu].theta_los;
    ju["phi_los"] = set.users[nu].phi_los;
    j["users"].push_back(std::move(ju));
  }
  return j;
}

inline ChannelSet channel_set_from_json(const nlohmann::json& j) {
  ChannelSet set;
  set.seed = j.at("seed").get<std::uint64_t>();
  set.sigma = j.at("sigma").get<Real>();
  for (const auto& ju : j.at("users")) {
    const auto rows = ju.at("rows").get<Eigen::Index>();
    const auto cols = ju.at("cols").get<Eigen::Index>();
    const auto flat = ju.at("entries").get<std::vector<Real>>();
    if (static_cast<Eigen::Index>(flat.size()) != 2 * rows * cols) {
      throw InvalidArgumentError("channel_set_from_json: entry count mismatch");
    }
    Mat h(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) {
        h(r, c) = Complex(flat[idx], flat[idx + 1]);
        idx += 2;
      }
    }
    set.H.push_back(std::move(h));
    UserGeometry ug;
    ug.x = ju.at("x").get<Real>();
    ug.y = ju.at("y").get<Real>();
    ug.distance = ju.at("distance").get<Real>();
    ug.theta_los = ju.at("theta_los").get<Real>();
    ug.phi_los = ju.at("phi_los").get<Real>();
    set.users.push_back(ug);
  }
  return set;
}

}  // namespace holobeam
