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

#include <algorithm>
#include <limits>
#include <vector>

#include "holobeam/channel.hpp"
#include "holobeam/matkit.hpp"

namespace holobeam {

// Objective evaluation for the joint design: per-user log-det rates (nats),
// their min and sum, the scaled-rate family and its soft-min companion, and
// the penalized objectives. All functions are pure.

/// Auxiliary variable and penalty factor of the penalized formulations.
struct PenaltyState {
  RealVec chi;     // length M^2 K, elementwise within [0, mu]
  Real rho = 0.0;  // > 0
};

/// Interference-plus-noise covariance at user nu:
/// G_nu = sum_{nu' != nu} [H_nu X W_nu']^2 + sigma I.
inline Mat interference_cov(const BasebandSet& w, const RealMat& x, const Mat& h_nu,
                            Real sigma, int nu) {
  const auto d = h_nu.rows();
  Mat g = sigma * Mat::Identity(d, d);
  const Mat hx = h_nu * x;
  for (int other = 0; other < static_cast<int>(w.size()); ++other) {
    if (other == nu) continue;
    g.noalias() += gram(Mat(hx * w[other]));
  }
  return g;
}

/// r_nu = ln|I + [H_nu X W_nu]^2 G_nu^{-1}|, evaluated through the stable
/// identity ln|G + S| - ln|G|.
inline Real user_rate(const BasebandSet& w, const RealMat& x, const Mat& h_nu,
                      Real sigma, int nu) {
  const Mat g = interference_cov(w, x, h_nu, sigma, nu);
  const Mat s = gram(Mat(h_nu * x * w[nu]));
  return logdet_hpd(Mat(g + s)) - logdet_hpd(g);
}

inline std::vector<Real> user_rates(const BasebandSet& w, const RealMat& x,
                                    const ChannelSet& channels) {
  std::vector<Real> rates(w.size());
  for (int nu = 0; nu < static_cast<int>(w.size()); ++nu) {
    rates[nu] = user_rate(w, x, channels.H[nu], channels.sigma, nu);
  }
  return rates;
}

inline Real min_rate(const BasebandSet& w, const RealMat& x, const ChannelSet& channels) {
  const auto rates = user_rates(w, x, channels);
  return *std::min_element(rates.begin(), rates.end());
}

inline Real sum_rate(const BasebandSet& w, const RealMat& x, const ChannelSet& channels) {
  const auto rates = user_rates(w, x, channels);
  Real acc = 0.0;
  for (Real r : rates) acc += r;
  return acc;
}

/// Scaled rate r_{nu,c} = ln|I + (1/c) [H X W_nu]^2 G_nu^{-1}|; c = 1 gives
/// the plain rate, and the value is nonincreasing in c.
inline Real scaled_user_rate(const BasebandSet& w, const RealMat& x, const Mat& h_nu,
                             Real sigma, int nu, Real c) {
  if (!(c > 0.0) || c > 1.0) {
    throw InvalidArgumentError("scaled_user_rate: need 0 < c <= 1");
  }
  const Mat g = interference_cov(w, x, h_nu, sigma, nu);
  const Mat s = gram(Mat(h_nu * x * w[nu]));
  return logdet_hpd(Mat(c * g + s)) - logdet_hpd(Mat(c * g));
}

/// Pi_nu = I - (HXW)^H ([HXW]^2 + c G)^{-1} (HXW). Eigenvalues lie in (0, 1].
inline Mat scaled_pi(const BasebandSet& w, const RealMat& x, const Mat& h_nu,
                     Real sigma, int nu, Real c) {
  if (!(c > 0.0) || c > 1.0) {
    throw InvalidArgumentError("scaled_pi: need 0 < c <= 1");
  }
  const Mat v = h_nu * x * w[nu];
  const Mat g = interference_cov(w, x, h_nu, sigma, nu);
  const Mat denom = gram(v) + c * g;
  const auto d = v.cols();
  return Mat(Mat::Identity(d, d) - v.adjoint() * hpd_solve(denom, v));
}

/// The equivalent inverse form (I + (1/c) (HXW)^H G^{-1} (HXW))^{-1};
/// kept as an independent route for cross-checks.
inline Mat scaled_pi_inverse_form(const BasebandSet& w, const RealMat& x, const Mat& h_nu,
                                  Real sigma, int nu, Real c) {
  if (!(c > 0.0) || c > 1.0) {
    throw InvalidArgumentError("scaled_pi_inverse_form: need 0 < c <= 1");
  }
  const Mat v = h_nu * x * w[nu];
  const Mat g = interference_cov(w, x, h_nu, sigma, nu);
  const auto d = v.cols();
  const Mat inner = Mat::Identity(d, d) + (1.0 / c) * v.adjoint() * hpd_solve(g, v);
  return hpd_inverse(hermitize(inner));
}

inline Mat pi_sum(const BasebandSet& w, const RealMat& x, const ChannelSet& channels,
                  Real c) {
  const auto d = channels.H.front().rows();
  Mat acc = Mat::Zero(d, d);
  for (int nu = 0; nu < static_cast<int>(w.size()); ++nu) {
    acc += scaled_pi(w, x, channels.H[nu], channels.sigma, nu, c);
  }
  return hermitize(acc);
}

/// ln|sum_nu Pi_nu|, the smooth companion of the scaled min rate. Satisfies
/// min_nu r_{nu,c} > -ln|sum Pi| > min_nu r_{nu,c} - ln(N_u).
inline Real soft_min_objective(const BasebandSet& w, const RealMat& x,
                               const ChannelSet& channels, Real c) {
  const Mat pi = pi_sum(w, x, channels, c);
  try {
    return logdet_hpd(pi);
  } catch (const NotPositiveDefiniteError&) {
    throw SingularMatrixError("soft_min_objective: sum of Pi matrices is singular");
  }
}

inline Real min_scaled_rate(const BasebandSet& w, const RealMat& x,
                            const ChannelSet& channels, Real c) {
  Real best = std::numeric_limits<Real>::infinity();
  for (int nu = 0; nu < static_cast<int>(w.size()); ++nu) {
    best = std::min(best, scaled_user_rate(w, x, channels.H[nu], channels.sigma, nu, c));
  }
  return best;
}

inline Real penalty_term(const RealMat& x, const RealVec& chi) {
  return (vec(x) - chi).squaredNorm();
}

/// f_S - rho ||vec(X) - chi||^2.
inline Real penalized_sum(const BasebandSet& w, const RealMat& x, const RealVec& chi,
                          Real rho, const ChannelSet& channels) {
  if (!(rho > 0.0)) {
    throw InvalidArgumentError("penalized_sum: rho must be > 0");
  }
  return sum_rate(w, x, channels) - rho * penalty_term(x, chi);
}

/// ln|sum Pi| + rho ||vec(X) - chi||^2 (to be minimized).
inline Real penalized_soft(const BasebandSet& w, const RealMat& x, const RealVec& chi,
                           Real rho, Real c, const ChannelSet& channels) {
  if (!(rho > 0.0)) {
    throw InvalidArgumentError("penalized_soft: rho must be > 0");
  }
  return soft_min_objective(w, x, channels, c) + rho * penalty_term(x, chi);
}

/// Total transmit power sum_nu ||X W_nu||^2.
inline Real transmit_power(const BasebandSet& w, const RealMat& x) {
  Real acc = 0.0;
  for (const auto& w_nu : w) acc += (x.cast<Complex>() * w_nu).squaredNorm();
  return acc;
}

}  // namespace holobeam
