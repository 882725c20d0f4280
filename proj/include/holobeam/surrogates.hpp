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

#include "holobeam/rates.hpp"

namespace holobeam {

// Tight quadratic minorants/majorants of the log-det objectives, expanded at
// the current iterate. Every bundle touches its target exactly at the
// expansion point; the curvature matrices are PSD up to round-off, which
// makes the block subproblems convex.

// ---------------------------------------------------------------------------
// Fundamental bundles
// ---------------------------------------------------------------------------

/// Affine lower bound on (V, Y) |-> ln|I + V V^H Y^{-1}|, Y Hermitian PD:
///   value(V, Y) = constant + 2 Re<linear, V> - <multiplier, V V^H + Y>.
struct LogdetRatioMinorant {
  Real constant = 0.0;
  Mat linear;      // Ybar^{-1} Vbar
  Mat multiplier;  // Ybar^{-1} - (Vbar Vbar^H + Ybar)^{-1}, PSD

  Real value(const Mat& v, const Mat& y) const {
    return constant + 2.0 * inner(linear, v).real() -
           inner(multiplier, Mat(gram(v) + y)).real();
  }
};

inline LogdetRatioMinorant logdet_ratio_minorant(const Mat& v_bar, const Mat& y_bar) {
  Mat y_inv;
  try {
    y_inv = hpd_inverse(y_bar);
  } catch (const NotPositiveDefiniteError&) {
    throw SingularMatrixError("logdet_ratio_minorant: expansion Y is singular");
  }
  const Mat v_gram = gram(v_bar);
  LogdetRatioMinorant b;
  b.linear = y_inv * v_bar;
  b.multiplier = hermitize(Mat(y_inv - hpd_inverse(Mat(v_gram + y_bar))));
  b.constant = logdet_hpd(Mat(v_gram + y_bar)) - logdet_hpd(y_bar) -
               (v_gram * y_inv).trace().real();
  return b;
}

/// Affine upper bound on ln|sum_nu (I - V_nu^H Y_nu^{-1} V_nu)| over the
/// domain V_nu V_nu^H < Y_nu:
///   value = constant - sum_nu 2 Re<linear_nu, V_nu> + sum_nu <multiplier_nu, Y_nu>.
struct PiLogdetMajorant {
  Real constant = 0.0;
  std::vector<Mat> linear;      // Ybar^{-1} Vbar Pibar^{-1}
  std::vector<Mat> multiplier;  // Ybar^{-1} Vbar Pibar^{-1} Vbar^H Ybar^{-1}, PSD

  Real value(const std::vector<Mat>& vs, const std::vector<Mat>& ys) const {
    Real acc = constant;
    for (std::size_t nu = 0; nu < linear.size(); ++nu) {
      acc -= 2.0 * inner(linear[nu], vs[nu]).real();
      acc += inner(multiplier[nu], ys[nu]).real();
    }
    return acc;
  }
};

inline Mat pi_of(const std::vector<Mat>& vs, const std::vector<Mat>& ys) {
  const auto d = vs.front().cols();
  Mat pi = Mat::Zero(d, d);
  for (std::size_t nu = 0; nu < vs.size(); ++nu) {
    pi += Mat::Identity(d, d) - vs[nu].adjoint() * hpd_solve(ys[nu], vs[nu]);
  }
  return hermitize(pi);
}

inline PiLogdetMajorant pi_logdet_majorant(const std::vector<Mat>& vs_bar,
                                           const std::vector<Mat>& ys_bar) {
  for (std::size_t nu = 0; nu < vs_bar.size(); ++nu) {
    Eigen::LLT<Mat> llt(hermitize(Mat(ys_bar[nu] - gram(vs_bar[nu]))));
    if (llt.info() != Eigen::Success) {
      throw DomainViolationError(
          "pi_logdet_majorant: expansion point violates V V^H < Y at user " +
          std::to_string(nu));
    }
  }
  const Mat pi_bar = pi_of(vs_bar, ys_bar);
  const Mat pi_inv = hpd_inverse(pi_bar);
  PiLogdetMajorant b;
  b.constant = logdet_hpd(pi_bar);
  for (std::size_t nu = 0; nu < vs_bar.size(); ++nu) {
    const Mat yiv = hpd_solve(ys_bar[nu], vs_bar[nu]);  // Y^{-1} V
    b.linear.push_back(yiv * pi_inv);
    b.multiplier.push_back(hermitize(Mat(yiv * pi_inv * yiv.adjoint())));
    b.constant += (pi_inv * vs_bar[nu].adjoint() * yiv).trace().real();
  }
  return b;
}

// ---------------------------------------------------------------------------
// Max-min (MM) and sum-rate (SR) surrogates: concave rate minorants
// ---------------------------------------------------------------------------

/// Concave quadratic over the full precoder set, attributed to one user:
///   value(W) = constant + 2 Re<linear, W_nu> - <curvature, sum_nu' W_nu' W_nu'^H>.
struct BasebandSurrogate {
  Real constant = 0.0;
  Mat linear;     // K x D
  Mat curvature;  // K x K Hermitian PSD, shared across all users' grams
};

inline Real mm_baseband_value(const std::vector<BasebandSurrogate>& s,
                              const BasebandSet& w, int nu) {
  Mat gram_sum = Mat::Zero(s[nu].curvature.rows(), s[nu].curvature.cols());
  for (const auto& w_nu : w) gram_sum += gram(w_nu);
  return s[nu].constant + 2.0 * inner(s[nu].linear, w[nu]).real() -
         inner(s[nu].curvature, gram_sum).real();
}

/// Per-user concave minorants of r_nu(W, X fixed) expanded at (W, X).
inline std::vector<BasebandSurrogate> mm_baseband_surrogates(const BasebandSet& w,
                                                             const RealMat& x,
                                                             const ChannelSet& channels) {
  std::vector<BasebandSurrogate> out;
  out.reserve(w.size());
  for (int nu = 0; nu < static_cast<int>(w.size()); ++nu) {
    const Mat hc = channels.H[nu] * x;  // effective channel, D x K
    const Mat v_bar = hc * w[nu];
    const Mat y_bar = interference_cov(w, x, channels.H[nu], channels.sigma, nu);
    const LogdetRatioMinorant bundle = logdet_ratio_minorant(v_bar, y_bar);
    BasebandSurrogate s;
    s.constant = bundle.constant - channels.sigma * bundle.multiplier.trace().real();
    s.linear = hc.adjoint() * bundle.linear;
    s.curvature = hermitize(Mat(hc.adjoint() * bundle.multiplier * hc));
    out.push_back(std::move(s));
  }
  return out;
}

/// Concave quadratic over the holographic amplitudes, attributed to one user:
///   value(X) = constant + 2 Re<linear, X> - <curvature, X A X^T>,
/// where A is the shared gram weight of the surrogate family.
struct HoloSurrogate {
  Real constant = 0.0;
  Mat linear;     // M^2 x K
  Mat curvature;  // M^2 x M^2 Hermitian PSD
};

struct MmHoloSurrogates {
  std::vector<HoloSurrogate> users;
  Mat gram_weight;  // K x K, sum_nu W_nu W_nu^H of the fixed precoders
};

inline Real mm_holo_value(const MmHoloSurrogates& s, const RealMat& x, int nu) {
  const Mat xc = x.cast<Complex>();
  return s.users[nu].constant + 2.0 * inner(s.users[nu].linear, xc).real() -
         inner(s.users[nu].curvature, Mat(xc * s.gram_weight * xc.adjoint())).real();
}

/// Per-user concave minorants of r_nu(W fixed, X) expanded at (W, X).
inline MmHoloSurrogates mm_holo_surrogates(const BasebandSet& w, const RealMat& x,
                                           const ChannelSet& channels) {
  MmHoloSurrogates out;
  const auto k = w.front().rows();
  out.gram_weight = Mat::Zero(k, k);
  for (const auto& w_nu : w) out.gram_weight += gram(w_nu);
  out.gram_weight = hermitize(out.gram_weight);
  for (int nu = 0; nu < static_cast<int>(w.size()); ++nu) {
    const Mat v_bar = channels.H[nu] * x * w[nu];
    const Mat y_bar = interference_cov(w, x, channels.H[nu], channels.sigma, nu);
    const LogdetRatioMinorant bundle = logdet_ratio_minorant(v_bar, y_bar);
    HoloSurrogate s;
    s.constant = bundle.constant - channels.sigma * bundle.multiplier.trace().real();
    s.linear = channels.H[nu].adjoint() * bundle.linear * w[nu].adjoint();
    s.curvature =
        hermitize(Mat(channels.H[nu].adjoint() * bundle.multiplier * channels.H[nu]));
    out.users.push_back(std::move(s));
  }
  return out;
}

/// Sum-rate minorant over the precoder set with a single shared curvature:
///   value(W) = constant + sum_nu [2 Re<linear_nu, W_nu> - <curvature, W_nu W_nu^H>].
struct SumRateBasebandSurrogate {
  Real constant = 0.0;
  std::vector<Mat> linear;
  Mat curvature;  // K x K, sum of per-user curvatures

  Real value(const BasebandSet& w) const {
    Real acc = constant;
    for (std::size_t nu = 0; nu < w.size(); ++nu) {
      acc += 2.0 * inner(linear[nu], w[nu]).real();
      acc -= inner(curvature, gram(w[nu])).real();
    }
    return acc;
  }
};

inline SumRateBasebandSurrogate sr_baseband_surrogate(const BasebandSet& w,
                                                      const RealMat& x,
                                                      const ChannelSet& channels) {
  const auto per_user = mm_baseband_surrogates(w, x, channels);
  SumRateBasebandSurrogate s;
  s.curvature = Mat::Zero(per_user.front().curvature.rows(), per_user.front().curvature.cols());
  for (const auto& u : per_user) {
    s.constant += u.constant;
    s.linear.push_back(u.linear);
    s.curvature += u.curvature;
  }
  s.curvature = hermitize(s.curvature);
  return s;
}

// ---------------------------------------------------------------------------
// Vectorized holographic quadratics
// ---------------------------------------------------------------------------

/// Real quadratic over z = vec(X):
///   SR (minorant, maximize):  constant + 2 linear^T z - z^T quadratic z
///   SMM (majorant, minimize): constant - 2 linear^T z + z^T quadratic z
/// `power` is the PSD matrix of the transmit-power constraint z^T power z <= P.
struct VectorizedQuadratic {
  Real constant = 0.0;
  RealVec linear;
  RealMat quadratic;
  RealMat power;
};

inline Real sr_holo_value(const VectorizedQuadratic& q, const RealVec& z) {
  return q.constant + 2.0 * q.linear.dot(z) - z.dot(q.quadratic * z);
}

inline Real smm_holo_value(const VectorizedQuadratic& q, const RealVec& z) {
  return q.constant - 2.0 * q.linear.dot(z) + z.dot(q.quadratic * z);
}

/// Power-constraint quadratic Re(A)^T (x) I, so that z^T D1 z = ||X sqrt(A)||^2.
inline RealMat power_quadratic(const Mat& gram_weight, Eigen::Index m2) {
  const RealMat a_re = gram_weight.real();
  return kron(RealMat(a_re.transpose()), RealMat(RealMat::Identity(m2, m2)));
}

/// Vectorized form of the summed holographic minorant.
inline VectorizedQuadratic sr_holo_vectorized(const BasebandSet& w, const RealMat& x,
                                              const ChannelSet& channels) {
  const MmHoloSurrogates per_user = mm_holo_surrogates(w, x, channels);
  const auto m2 = x.rows();
  VectorizedQuadratic q;
  q.linear = RealVec::Zero(m2 * x.cols());
  Mat curvature_sum = Mat::Zero(m2, m2);
  for (const auto& u : per_user.users) {
    q.constant += u.constant;
    q.linear += vec(RealMat(u.linear.real()));
    curvature_sum += u.curvature;
  }
  const Mat kron_c = kron(Mat(per_user.gram_weight.transpose()), curvature_sum);
  q.quadratic = symmetrize(kron_c.real());
  q.power = power_quadratic(per_user.gram_weight, m2);
  return q;
}

// ---------------------------------------------------------------------------
// Soft max-min (SMM) surrogates: convex majorants of ln|Pi|
// ---------------------------------------------------------------------------

/// Convex majorant of W |-> ln|Pi(W, X fixed)|:
///   value(W) = constant - sum_nu 2 Re<linear_nu, W_nu> + sum_nu <curvature_nu, W_nu W_nu^H>.
struct SoftMinBasebandSurrogate {
  Real constant = 0.0;
  std::vector<Mat> linear;     // K x D each
  std::vector<Mat> curvature;  // K x K each, PSD

  Real value(const BasebandSet& w) const {
    Real acc = constant;
    for (std::size_t nu = 0; nu < w.size(); ++nu) {
      acc -= 2.0 * inner(linear[nu], w[nu]).real();
      acc += inner(curvature[nu], gram(w[nu])).real();
    }
    return acc;
  }
};

inline SoftMinBasebandSurrogate smm_baseband_surrogates(const BasebandSet& w,
                                                        const RealMat& x,
                                                        const ChannelSet& channels,
                                                        Real c) {
  const int n_users = static_cast<int>(w.size());
  std::vector<Mat> hc(n_users), vs(n_users), ys(n_users);
  for (int nu = 0; nu < n_users; ++nu) {
    hc[nu] = channels.H[nu] * x;
    vs[nu] = hc[nu] * w[nu];
    ys[nu] = gram(vs[nu]) +
             c * interference_cov(w, x, channels.H[nu], channels.sigma, nu);
  }
  const PiLogdetMajorant bundle = pi_logdet_majorant(vs, ys);
  SoftMinBasebandSurrogate s;
  s.constant = bundle.constant;
  std::vector<Mat> lifted(n_users);  // Hc^H C Hc per user
  for (int nu = 0; nu < n_users; ++nu) {
    s.constant += c * channels.sigma * bundle.multiplier[nu].trace().real();
    s.linear.push_back(hc[nu].adjoint() * bundle.linear[nu]);
    lifted[nu] = hermitize(Mat(hc[nu].adjoint() * bundle.multiplier[nu] * hc[nu]));
  }
  for (int nu = 0; nu < n_users; ++nu) {
    Mat curv = lifted[nu];
    for (int other = 0; other < n_users; ++other) {
      if (other != nu) curv += c * lifted[other];
    }
    s.curvature.push_back(hermitize(curv));
  }
  return s;
}

/// Convex vectorized majorant of X |-> ln|Pi(W fixed, X)|. The quadratic uses
/// per-user gram weights A_nu = W_nu W_nu^H + c sum_{nu' != nu} W_nu' W_nu'^H;
/// the power matrix uses the unweighted sum of grams.
inline VectorizedQuadratic smm_holo_vectorized(const BasebandSet& w, const RealMat& x,
                                               const ChannelSet& channels, Real c) {
  const int n_users = static_cast<int>(w.size());
  const auto m2 = x.rows();
  const auto k = w.front().rows();
  std::vector<Mat> vs(n_users), ys(n_users);
  for (int nu = 0; nu < n_users; ++nu) {
    vs[nu] = channels.H[nu] * x * w[nu];
    ys[nu] = gram(vs[nu]) +
             c * interference_cov(w, x, channels.H[nu], channels.sigma, nu);
  }
  const PiLogdetMajorant bundle = pi_logdet_majorant(vs, ys);

  Mat gram_sum = Mat::Zero(k, k);
  for (const auto& w_nu : w) gram_sum += gram(w_nu);

  VectorizedQuadratic q;
  q.constant = bundle.constant;
  q.quadratic = RealMat::Zero(m2 * k, m2 * k);
  Mat b_row = Mat::Zero(k, m2);  // sums W_nu B_nu H_nu
  for (int nu = 0; nu < n_users; ++nu) {
    q.constant += c * channels.sigma * bundle.multiplier[nu].trace().real();
    b_row += w[nu] * bundle.linear[nu].adjoint() * channels.H[nu];
    const Mat lifted =
        hermitize(Mat(channels.H[nu].adjoint() * bundle.multiplier[nu] * channels.H[nu]));
    const Mat a_nu = hermitize(Mat(gram(w[nu]) + c * (gram_sum - gram(w[nu]))));
    q.quadratic += kron(Mat(a_nu.transpose()), lifted).real();
  }
  q.quadratic = symmetrize(q.quadratic);
  q.linear = vec(RealMat(b_row.transpose().real()));
  q.power = power_quadratic(hermitize(gram_sum), m2);
  return q;
}

}  // namespace holobeam
