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

#include <vector>

#include "holobeam/common.hpp"

namespace holobeam {

// Reconfigurable holographic surface: K feeds under an M x M planar element
// grid in the z = 0 plane. Element (m, m') sits at ((m-1) d_s, (m'-1) d_s, 0)
// and maps to linear index (m'-1)*M + (m-1), i.e. column-major over the grid,
// matching the column-stacking convention used for the amplitude matrices.

struct RhsGeometry {
  int elements_per_side = 0;  // M
  int feed_count = 0;         // K
  Real element_spacing = 0.0;
  Real wavelength = 0.0;
  Real refractive_index = 1.7320508075688772;  // substrate, sqrt(3)
  std::vector<Eigen::Vector3d> feed_positions;
  std::vector<Eigen::Vector3d> element_positions;

  int element_count() const { return elements_per_side * elements_per_side; }

  int element_index(int m, int mp) const { return mp * elements_per_side + m; }

  /// Default layout: elements on the grid described above, feeds uniformly
  /// spaced on a line along x under the array center at z = -wavelength/2.
  static RhsGeometry make(int m_side, int feeds, Real spacing, Real lambda,
                          Real refractive = 1.7320508075688772) {
    if (m_side < 1 || feeds < 1) {
      throw InvalidArgumentError("RhsGeometry: M and K must be >= 1");
    }
    if (!(spacing > 0.0) || !(lambda > 0.0)) {
      throw InvalidArgumentError("RhsGeometry: spacing and wavelength must be > 0");
    }
    RhsGeometry g;
    g.elements_per_side = m_side;
    g.feed_count = feeds;
    g.element_spacing = spacing;
    g.wavelength = lambda;
    g.refractive_index = refractive;
    g.element_positions.resize(static_cast<std::size_t>(m_side) * m_side);
    for (int mp = 0; mp < m_side; ++mp) {
      for (int m = 0; m < m_side; ++m) {
        g.element_positions[g.element_index(m, mp)] =
            Eigen::Vector3d(m * spacing, mp * spacing, 0.0);
      }
    }
    const Real extent = (m_side - 1) * spacing;
    g.feed_positions.resize(feeds);
    for (int k = 0; k < feeds; ++k) {
      const Real x = feeds == 1 ? 0.5 * extent : extent * k / (feeds - 1);
      g.feed_positions[k] = Eigen::Vector3d(x, 0.5 * extent, -0.5 * lambda);
    }
    return g;
  }
};

/// Free-space propagation vector for direction (theta, phi); theta is the
/// polar angle off the array normal, phi the azimuth in the array plane.
inline Eigen::Vector3d propagation_vector(Real wavelength, Real theta, Real phi) {
  const Real kappa = 2.0 * kPi / wavelength;
  return kappa * Eigen::Vector3d(std::cos(phi) * std::sin(theta),
                                 std::sin(phi) * std::sin(theta), std::cos(theta));
}

/// Interference psi between the object wave toward (theta, phi) and feed k's
/// reference wave at element (m, m'). The reference wave travels inside the
/// substrate, so its phase is refractive_index * (2 pi / lambda) times the
/// feed-to-element distance. |psi| = 1 always.
inline Complex interference_pattern(const RhsGeometry& geom, int k, int m, int mp,
                                    Real theta, Real phi) {
  if (k < 0 || k >= geom.feed_count || m < 0 || m >= geom.elements_per_side || mp < 0 ||
      mp >= geom.elements_per_side) {
    throw InvalidArgumentError("interference_pattern: feed or element index out of range");
  }
  const Eigen::Vector3d& p = geom.element_positions[geom.element_index(m, mp)];
  const Eigen::Vector3d d = p - geom.feed_positions[k];
  const Real object_phase = propagation_vector(geom.wavelength, theta, phi).dot(p);
  const Real reference_phase =
      geom.refractive_index * (2.0 * kPi / geom.wavelength) * d.norm();
  // e^{-j object} * conj(e^{-j reference})
  return std::polar(1.0, reference_phase - object_phase);
}

/// (Re psi + 1) / 2, the normalized radiation amplitude in [0, 1].
inline Real normalized_amplitude(Complex psi) {
  if (std::abs(psi) > 1.0 + 1e-12) {
    throw InvalidArgumentError("normalized_amplitude: |psi| exceeds 1");
  }
  return 0.5 * (psi.real() + 1.0);
}

/// Per-element, per-feed upper bounds on the scaled radiation amplitudes.
/// Row = element linear index, column = feed.
struct AmplitudeBounds {
  RealMat mu;  // M^2 x K, entries in [0, 1]

  int element_count() const { return static_cast<int>(mu.rows()); }
  int feed_count() const { return static_cast<int>(mu.cols()); }
};

/// Holographic superposition of one object beam per user direction: the
/// bound is the arithmetic mean over users of the normalized amplitudes.
inline AmplitudeBounds init_amplitude_bounds(
    const RhsGeometry& geom, const std::vector<std::pair<Real, Real>>& user_directions) {
  if (user_directions.empty()) {
    throw InvalidArgumentError("init_amplitude_bounds: need at least one direction");
  }
  const int m_side = geom.elements_per_side;
  AmplitudeBounds bounds;
  bounds.mu = RealMat::Zero(geom.element_count(), geom.feed_count);
  for (int k = 0; k < geom.feed_count; ++k) {
    for (int mp = 0; mp < m_side; ++mp) {
      for (int m = 0; m < m_side; ++m) {
        Real acc = 0.0;
        for (const auto& [theta, phi] : user_directions) {
          acc += normalized_amplitude(interference_pattern(geom, k, m, mp, theta, phi));
        }
        bounds.mu(geom.element_index(m, mp), k) =
            acc / static_cast<Real>(user_directions.size());
      }
    }
  }
  return bounds;
}

}  // namespace holobeam
