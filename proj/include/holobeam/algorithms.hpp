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

#include <chrono>
#include <vector>

#include "holobeam/rhs_model.hpp"
#include "holobeam/subsolvers.hpp"
#include "holobeam/surrogates.hpp"

namespace holobeam {

// The three outer loops (max-min via the epigraph solver, penalized sum-rate
// and penalized soft max-min via closed forms), with their shared
// initialization, amplitude projection and penalty scheduling.

struct AlgorithmConfig {
  Real power_budget_watts = 0.0;
  Real c = 1.0;                   // rate scaling for the soft max-min
  Real penalty_growth = 1.2;      // rho multiplier on trigger
  Real penalty_trigger = 0.9;     // grow rho when penalty > trigger * previous
  Real mm_objective_tol = 1e-3;   // max-min outer stop
  Real penalty_stop = 1e-2;       // penalized outer stop (feasibility part)
  Real objective_stabilize_tol = 1e-3;  // penalized outer stop (progress part)
  int max_outer_mm = 500;
  int max_outer_penalized = 2000;
  Real inner_tol = 1e-10;         // interior-point duality-gap target
  Real bisection_tol = 1e-8;      // relative residual of the power equation
  Real rho_floor = 1e-3;
  bool record_iterates = false;   // keep per-iteration snapshots in the result
};

struct IterateSnapshot {
  BasebandSet W;
  RealMat X;
  RealVec chi;
  Real rho = 0.0;
};

struct TracePoint {
  int iter = 0;
  Real objective = 0.0;  // min rate (MM) or penalized objective (SR/SMM)
  Real min_rate = 0.0;
  Real sum_rate = 0.0;
  Real penalty = 0.0;
  Real rho = 0.0;
  Real wall_ms = 0.0;
};

struct RunTrace {
  std::vector<TracePoint> points;
  bool hit_iteration_cap = false;
  Real pre_projection_gap = 0.0;  // ||vec X - clamp(vec X)|| before reporting
  Real power_rescale = 1.0;       // applied to W if projection broke the budget
};

struct RunResult {
  BasebandSet W;
  RealMat X;
  RunTrace trace;
  std::vector<IterateSnapshot> iterates;  // filled when cfg.record_iterates
};

struct InitPoint {
  BasebandSet W;
  RealMat X;
  RealVec chi;
};

/// Elementwise clamp of the amplitude vector onto [0, mu]; this is the exact
/// minimizer of ||x - chi||^2 over the box.
inline RealVec project_amplitudes(const RealVec& x, const AmplitudeBounds& bounds) {
  const RealVec mu = vec(bounds.mu);
  if (x.size() != mu.size()) {
    throw InvalidArgumentError("project_amplitudes: size mismatch");
  }
  return x.cwiseMax(0.0).cwiseMin(mu);
}

/// Scale the precoder set so that sum_nu ||X W_nu||^2 equals the budget.
inline void scale_to_power(BasebandSet& w, const RealMat& x, Real budget) {
  const Real p = transmit_power(w, x);
  if (!(p > 0.0)) {
    throw InvalidArgumentError("scale_to_power: zero transmit power");
  }
  const Real s = std::sqrt(budget / p);
  for (auto& w_nu : w) w_nu *= s;
}

/// Random feasible start: amplitudes uniform in [0, mu], complex Gaussian
/// precoders scaled to the exact power budget, and chi a clamped perturbation
/// of vec(X).
inline InitPoint init_point(const AmplitudeBounds& bounds, int feeds, int streams,
                            int num_users, Real budget, Rng& rng) {
  if (!(budget > 0.0)) {
    throw InvalidArgumentError("init_point: power budget must be > 0");
  }
  InitPoint p;
  const auto m2 = bounds.mu.rows();
  p.X = RealMat(m2, bounds.mu.cols());
  for (Eigen::Index j = 0; j < p.X.cols(); ++j) {
    for (Eigen::Index i = 0; i < m2; ++i) {
      p.X(i, j) = rng.uniform() * bounds.mu(i, j);
    }
  }
  p.W.resize(num_users);
  for (int nu = 0; nu < num_users; ++nu) {
    p.W[nu] = Mat(feeds, streams);
    for (Eigen::Index j = 0; j < streams; ++j) {
      for (Eigen::Index i = 0; i < feeds; ++i) p.W[nu](i, j) = rng.cnormal();
    }
  }
  scale_to_power(p.W, p.X, budget);
  const RealVec mu = vec(bounds.mu);
  RealVec x0 = vec(p.X);
  p.chi = RealVec(x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    p.chi(i) = x0(i) + rng.uniform(-0.1, 0.1) * mu(i);
  }
  p.chi = p.chi.cwiseMax(0.0).cwiseMin(mu);
  return p;
}

// ---------------------------------------------------------------------------
// Closed-form block updates
// ---------------------------------------------------------------------------

struct ClosedFormBaseband {
  BasebandSet W;
  bool constrained = false;  // tau branch taken
  Real tau = 0.0;
  Real power = 0.0;  // sum_nu <X^T X, [W_nu]^2> at the returned point
};

struct ClosedFormHolo {
  RealVec x;
  bool constrained = false;
  Real tau = 0.0;
  Real power = 0.0;  // x^T D1 x at the returned point
};

namespace detail {

/// Cholesky with the standard jitter fallback for nominally-PD curvature.
inline Eigen::LLT<Mat> pd_factor(const Mat& a) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) return llt;
  const Real jitter = 1e-12 * std::abs(a.trace()) / static_cast<Real>(a.rows());
  Eigen::LLT<Mat> llt2(Mat(a + jitter * Mat::Identity(a.rows(), a.cols())));
  if (llt2.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("pd_factor: curvature is not positive definite");
  }
  return llt2;
}

/// Spectral data of the pencil (C, G): with C = L L^H and
/// L^{-1} G L^{-H} = U diag(lambda) U^H, the tau-regularized solve
/// (C + tau G)^{-1} R becomes L^{-H} U (I + tau diag(lambda))^{-1} U^H L^{-1} R.
struct Pencil {
  Mat l;        // Cholesky factor of C
  Mat u;        // eigenvectors
  RealVec lam;  // eigenvalues of the scaled G
  Mat z;        // U^H L^{-1} R

  Mat solve(Real tau) const {
    Mat scaled = z;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      scaled.row(i) /= (1.0 + tau * lam(i));
    }
    return l.adjoint().template triangularView<Eigen::Upper>().solve(Mat(u * scaled));
  }

  /// ||sqrt(G) solve(tau)||^2 as an explicit rational function of tau.
  Real weighted_power(Real tau) const {
    Real acc = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const Real denom = 1.0 + tau * lam(i);
      acc += lam(i) * z.row(i).squaredNorm() / (denom * denom);
    }
    return acc;
  }
};

inline Pencil make_pencil(const Mat& curvature, const Mat& power_metric, const Mat& rhs) {
  Pencil p;
  Eigen::LLT<Mat> llt = pd_factor(curvature);
  p.l = llt.matrixL();
  const Mat linv_g =
      p.l.template triangularView<Eigen::Lower>().solve(power_metric);
  const Mat s = p.l.template triangularView<Eigen::Lower>()
                    .solve(Mat(linv_g.adjoint()))
                    .adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(s));
  p.u = es.eigenvectors();
  p.lam = es.eigenvalues().cwiseMax(0.0);
  p.z = p.u.adjoint() * p.l.template triangularView<Eigen::Lower>().solve(rhs);
  return p;
}

}  // namespace detail

/// Sum-rate baseband update: W_nu = C1^{-1} B_nu^H, or the tau-regularized
/// solve with tau pinned by bisection on the power equation.
inline ClosedFormBaseband closed_form_baseband_sr(const SumRateBasebandSurrogate& s,
                                                  const RealMat& x, Real budget,
                                                  Real bisection_tol = 1e-8) {
  const Mat g = (x.transpose() * x).cast<Complex>();
  const int n_users = static_cast<int>(s.linear.size());
  ClosedFormBaseband out;
  Eigen::LLT<Mat> llt = detail::pd_factor(s.curvature);
  out.W.resize(n_users);
  Real power = 0.0;
  for (int nu = 0; nu < n_users; ++nu) {
    out.W[nu] = llt.solve(s.linear[nu]);
    power += inner(g, gram(out.W[nu])).real();
  }
  out.power = power;
  if (power <= budget) return out;

  Mat rhs(s.linear.front().rows(), n_users * s.linear.front().cols());
  const auto d = s.linear.front().cols();
  for (int nu = 0; nu < n_users; ++nu) rhs.middleCols(nu * d, d) = s.linear[nu];
  const detail::Pencil pencil = detail::make_pencil(s.curvature, g, rhs);
  try {
    out.tau = bisection_tau([&](Real tau) { return pencil.weighted_power(tau); }, budget,
                            bisection_tol);
  } catch (const NoBracketError&) {
    out.tau = 0.0;  // power exceeded the budget only by round-off
  }
  const Mat w_all = pencil.solve(out.tau);
  for (int nu = 0; nu < n_users; ++nu) out.W[nu] = w_all.middleCols(nu * d, d);
  out.power = pencil.weighted_power(out.tau);
  out.constrained = true;
  return out;
}

/// Soft max-min baseband update: per-user curvatures, one shared tau.
inline ClosedFormBaseband closed_form_baseband_smm(const SoftMinBasebandSurrogate& s,
                                                   const RealMat& x, Real budget,
                                                   Real bisection_tol = 1e-8) {
  const Mat g = (x.transpose() * x).cast<Complex>();
  const int n_users = static_cast<int>(s.linear.size());
  ClosedFormBaseband out;
  out.W.resize(n_users);
  Real power = 0.0;
  for (int nu = 0; nu < n_users; ++nu) {
    out.W[nu] = detail::pd_factor(s.curvature[nu]).solve(s.linear[nu]);
    power += inner(g, gram(out.W[nu])).real();
  }
  out.power = power;
  if (power <= budget) return out;

  std::vector<detail::Pencil> pencils;
  pencils.reserve(n_users);
  for (int nu = 0; nu < n_users; ++nu) {
    pencils.push_back(detail::make_pencil(s.curvature[nu], g, s.linear[nu]));
  }
  auto total = [&](Real tau) {
    Real acc = 0.0;
    for (const auto& p : pencils) acc += p.weighted_power(tau);
    return acc;
  };
  try {
    out.tau = bisection_tau(total, budget, bisection_tol);
  } catch (const NoBracketError&) {
    out.tau = 0.0;
  }
  for (int nu = 0; nu < n_users; ++nu) out.W[nu] = pencils[nu].solve(out.tau);
  out.power = total(out.tau);
  out.constrained = true;
  return out;
}

/// Holographic update shared by the penalized algorithms: the stationary
/// point of the penalized vectorized quadratic, with the power constraint
/// enforced through the tau branch when needed. Works for both the minorant
/// (maximize) and the majorant (minimize) since the normal equations match.
inline ClosedFormHolo closed_form_holo_penalized(const VectorizedQuadratic& q,
                                                 const RealVec& chi, Real rho,
                                                 Real budget,
                                                 Real bisection_tol = 1e-8) {
  if (!(rho > 0.0)) {
    throw InvalidArgumentError("closed_form_holo_penalized: rho must be > 0");
  }
  const auto n = q.linear.size();
  const Mat sys =
      (q.quadratic + rho * RealMat::Identity(n, n)).cast<Complex>();
  const Mat rhs = (q.linear + rho * chi).cast<Complex>();
  ClosedFormHolo out;
  const Mat x0 = detail::pd_factor(sys).solve(rhs);
  out.x = x0.real();
  out.power = out.x.dot(q.power * out.x);
  if (out.power <= budget) return out;

  const detail::Pencil pencil = detail::make_pencil(sys, q.power.cast<Complex>(), rhs);
  try {
    out.tau = bisection_tau([&](Real tau) { return pencil.weighted_power(tau); }, budget,
                            bisection_tol);
  } catch (const NoBracketError&) {
    out.tau = 0.0;
  }
  out.x = pencil.solve(out.tau).real();
  out.power = pencil.weighted_power(out.tau);
  out.constrained = true;
  return out;
}

inline ClosedFormHolo closed_form_holo_sr(const VectorizedQuadratic& q, const RealVec& chi,
                                          Real rho, Real budget, Real tol = 1e-8) {
  return closed_form_holo_penalized(q, chi, rho, budget, tol);
}

inline ClosedFormHolo closed_form_holo_smm(const VectorizedQuadratic& q, const RealVec& chi,
                                           Real rho, Real budget, Real tol = 1e-8) {
  return closed_form_holo_penalized(q, chi, rho, budget, tol);
}

// ---------------------------------------------------------------------------
// Outer loops
// ---------------------------------------------------------------------------

namespace detail {

inline Real elapsed_ms(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<Real, std::milli>(std::chrono::steady_clock::now() - from)
      .count();
}

/// Epigraph problem over the stacked real precoder variables.
inline MaxMinQpProblem baseband_maxmin_problem(const std::vector<BasebandSurrogate>& surr,
                                               const RealMat& x, Real budget) {
  const int n_users = static_cast<int>(surr.size());
  const auto k = surr.front().linear.rows();
  const auto d = surr.front().linear.cols();
  const int block = static_cast<int>(2 * k);
  const int n = n_users * static_cast<int>(d) * block;
  MaxMinQpProblem p;
  p.power_budget = budget;
  const RealMat g_block = realify_hermitian((x.transpose() * x).cast<Complex>());
  p.power_curvature = RealMat::Zero(n, n);
  for (int slot = 0; slot < n_users * d; ++slot) {
    p.power_curvature.block(slot * block, slot * block, block, block) = g_block;
  }
  for (int nu = 0; nu < n_users; ++nu) {
    QuadObjective q;
    q.constant = surr[nu].constant;
    q.linear = RealVec::Zero(n);
    for (Eigen::Index col = 0; col < d; ++col) {
      const int slot = nu * static_cast<int>(d) + static_cast<int>(col);
      q.linear.segment(slot * block, k) = surr[nu].linear.col(col).real();
      q.linear.segment(slot * block + k, k) = surr[nu].linear.col(col).imag();
    }
    const RealMat c_block = realify_hermitian(surr[nu].curvature);
    q.curvature = RealMat::Zero(n, n);
    for (int slot = 0; slot < n_users * d; ++slot) {
      q.curvature.block(slot * block, slot * block, block, block) = c_block;
    }
    p.objectives.push_back(std::move(q));
  }
  return p;
}

inline RealVec stack_baseband(const BasebandSet& w) {
  const auto k = w.front().rows();
  const auto d = w.front().cols();
  RealVec z(static_cast<Eigen::Index>(w.size()) * 2 * k * d);
  for (std::size_t nu = 0; nu < w.size(); ++nu) {
    z.segment(static_cast<Eigen::Index>(nu) * 2 * k * d, 2 * k * d) =
        realify_columns(w[nu]);
  }
  return z;
}

inline BasebandSet unstack_baseband(const RealVec& z, Eigen::Index k, Eigen::Index d,
                                    int n_users) {
  BasebandSet w(n_users);
  for (int nu = 0; nu < n_users; ++nu) {
    w[nu] = complexify_columns(z.segment(nu * 2 * k * d, 2 * k * d), k, d);
  }
  return w;
}

/// Epigraph problem over vec(X) with the amplitude box.
inline MaxMinQpProblem holo_maxmin_problem(const MmHoloSurrogates& surr,
                                           const AmplitudeBounds& bounds, Real budget) {
  const auto m2 = bounds.mu.rows();
  MaxMinQpProblem p;
  p.power_budget = budget;
  p.power_curvature = power_quadratic(surr.gram_weight, m2);
  p.upper_bounds = vec(bounds.mu);
  for (const auto& u : surr.users) {
    QuadObjective q;
    q.constant = u.constant;
    q.linear = vec(RealMat(u.linear.real()));
    q.curvature = symmetrize(
        kron(Mat(surr.gram_weight.transpose()), u.curvature).real());
    p.objectives.push_back(std::move(q));
  }
  return p;
}

inline Real maxmin_surrogate_value(const MaxMinQpProblem& p, const RealVec& z) {
  Real best = std::numeric_limits<Real>::infinity();
  for (const auto& q : p.objectives) best = std::min(best, q.value(z));
  return best;
}

}  // namespace detail

/// Alternating max-min optimization: epigraph quadratic solves for the
/// precoders and the amplitudes in turn. The min rate never decreases (each
/// block keeps its previous point when the solver cannot improve on it).
inline RunResult run_mm(const ChannelSet& channels, const AmplitudeBounds& bounds,
                        const AlgorithmConfig& cfg, const InitPoint& init) {
  const auto start = std::chrono::steady_clock::now();
  const int n_users = static_cast<int>(channels.H.size());
  const auto k = init.W.front().rows();
  const auto d = init.W.front().cols();
  BasebandSet w = init.W;
  RealMat x = init.X;
  RunResult result;
  Real f_prev = min_rate(w, x, channels);
  result.trace.points.push_back({0, f_prev, f_prev, sum_rate(w, x, channels), 0.0, 0.0,
                                 detail::elapsed_ms(start)});
  if (cfg.record_iterates) result.iterates.push_back({w, x, RealVec(), 0.0});
  result.trace.hit_iteration_cap = true;
  for (int iter = 1; iter <= cfg.max_outer_mm; ++iter) {
    const auto surr_b = mm_baseband_surrogates(w, x, channels);
    const MaxMinQpProblem prob_b =
        detail::baseband_maxmin_problem(surr_b, x, cfg.power_budget_watts);
    const RealVec warm_b = detail::stack_baseband(w);
    const SolverReport rep_b = solve_maxmin_qp(prob_b, cfg.inner_tol, warm_b);
    BasebandSet w_next = w;
    if (rep_b.objective >= detail::maxmin_surrogate_value(prob_b, warm_b)) {
      w_next = detail::unstack_baseband(rep_b.solution, k, d, n_users);
    }

    const MmHoloSurrogates surr_h = mm_holo_surrogates(w_next, x, channels);
    const MaxMinQpProblem prob_h =
        detail::holo_maxmin_problem(surr_h, bounds, cfg.power_budget_watts);
    const RealVec warm_h = vec(x);
    const SolverReport rep_h = solve_maxmin_qp(prob_h, cfg.inner_tol, warm_h);
    RealMat x_next = x;
    if (rep_h.objective >= detail::maxmin_surrogate_value(prob_h, warm_h)) {
      x_next = unvec(rep_h.solution, x.rows(), x.cols());
    }

    w = std::move(w_next);
    x = x_next;
    const Real f = min_rate(w, x, channels);
    result.trace.points.push_back({iter, f, f, sum_rate(w, x, channels), 0.0, 0.0,
                                   detail::elapsed_ms(start)});
    if (cfg.record_iterates) result.iterates.push_back({w, x, RealVec(), 0.0});
    if (std::abs(f - f_prev) < cfg.mm_objective_tol) {
      result.trace.hit_iteration_cap = false;
      break;
    }
    f_prev = f;
  }
  result.W = std::move(w);
  result.X = std::move(x);
  return result;
}

namespace detail {

/// Shared tail of the penalized algorithms: clamp X onto the box, and shrink
/// the precoders if the clamp pushed the transmit power above the budget.
inline void finalize_penalized(RunResult& result, const AmplitudeBounds& bounds,
                               Real budget) {
  const RealVec x_raw = vec(result.X);
  const RealVec x_proj = project_amplitudes(x_raw, bounds);
  result.trace.pre_projection_gap = (x_raw - x_proj).norm();
  result.X = unvec(x_proj, result.X.rows(), result.X.cols());
  const Real p = transmit_power(result.W, result.X);
  if (p > budget * (1.0 + 1e-12) && p > 0.0) {
    const Real s = std::sqrt(budget / p);
    for (auto& w_nu : result.W) w_nu *= s;
    result.trace.power_rescale = s;
  }
}

}  // namespace detail

/// Penalized sum-rate optimization via closed-form block updates. Terminates
/// once the penalty is below the threshold and the sum rate has stabilized;
/// rho grows on the trigger only while the penalty still exceeds the
/// threshold (unbounded growth would freeze X against chi).
inline RunResult run_sr(const ChannelSet& channels, const AmplitudeBounds& bounds,
                        const AlgorithmConfig& cfg, const InitPoint& init) {
  const auto start = std::chrono::steady_clock::now();
  BasebandSet w = init.W;
  RealMat x = init.X;
  RealVec chi = init.chi;
  Real penalty_prev = penalty_term(x, chi);
  Real rho = cfg.rho_floor;
  if (penalty_prev > 0.0) {
    rho = std::max(cfg.rho_floor, sum_rate(w, x, channels) / penalty_prev);
  }
  RunResult result;
  Real objective_prev = sum_rate(w, x, channels);
  result.trace.points.push_back({0, penalized_sum(w, x, chi, rho, channels),
                                 min_rate(w, x, channels), objective_prev,
                                 penalty_prev, rho, detail::elapsed_ms(start)});
  if (cfg.record_iterates) result.iterates.push_back({w, x, chi, rho});
  result.trace.hit_iteration_cap = true;
  for (int iter = 1; iter <= cfg.max_outer_penalized; ++iter) {
    const auto surr_b = sr_baseband_surrogate(w, x, channels);
    const auto cf_b = closed_form_baseband_sr(surr_b, x, cfg.power_budget_watts,
                                              cfg.bisection_tol);
    if (surr_b.value(cf_b.W) >= surr_b.value(w)) w = cf_b.W;

    const auto surr_h = sr_holo_vectorized(w, x, channels);
    const auto cf_h = closed_form_holo_sr(surr_h, chi, rho, cfg.power_budget_watts,
                                          cfg.bisection_tol);
    const RealVec x_vec = vec(x);
    const Real before = sr_holo_value(surr_h, x_vec) -
                        rho * (x_vec - chi).squaredNorm();
    const Real after = sr_holo_value(surr_h, cf_h.x) -
                       rho * (cf_h.x - chi).squaredNorm();
    if (after >= before) x = unvec(cf_h.x, x.rows(), x.cols());

    chi = project_amplitudes(vec(x), bounds);
    const Real penalty = penalty_term(x, chi);
    const Real objective = sum_rate(w, x, channels);
    result.trace.points.push_back({iter, penalized_sum(w, x, chi, rho, channels),
                                   min_rate(w, x, channels), objective, penalty, rho,
                                   detail::elapsed_ms(start)});
    if (cfg.record_iterates) result.iterates.push_back({w, x, chi, rho});
    const bool done = penalty < cfg.penalty_stop &&
                      std::abs(objective - objective_prev) < cfg.objective_stabilize_tol;
    if (penalty >= cfg.penalty_stop && penalty > cfg.penalty_trigger * penalty_prev) {
      rho *= cfg.penalty_growth;
    }
    penalty_prev = penalty;
    objective_prev = objective;
    if (done) {
      result.trace.hit_iteration_cap = false;
      break;
    }
  }
  result.W = std::move(w);
  result.X = std::move(x);
  detail::finalize_penalized(result, bounds, cfg.power_budget_watts);
  return result;
}

/// Penalized soft max-min optimization via closed-form block updates. The
/// stop and trigger rules follow run_sr, with the soft objective ln|Pi|
/// taking the role of the sum rate.
inline RunResult run_smm(const ChannelSet& channels, const AmplitudeBounds& bounds,
                         const AlgorithmConfig& cfg, const InitPoint& init) {
  const auto start = std::chrono::steady_clock::now();
  BasebandSet w = init.W;
  RealMat x = init.X;
  RealVec chi = init.chi;
  const Real c = cfg.c;
  Real penalty_prev = penalty_term(x, chi);
  Real rho = cfg.rho_floor;
  if (penalty_prev > 0.0) {
    rho = std::max(cfg.rho_floor,
                   std::abs(soft_min_objective(w, x, channels, c)) / penalty_prev);
  }
  RunResult result;
  Real objective_prev = soft_min_objective(w, x, channels, c);
  result.trace.points.push_back({0, penalized_soft(w, x, chi, rho, c, channels),
                                 min_rate(w, x, channels), sum_rate(w, x, channels),
                                 penalty_prev, rho, detail::elapsed_ms(start)});
  if (cfg.record_iterates) result.iterates.push_back({w, x, chi, rho});
  result.trace.hit_iteration_cap = true;
  for (int iter = 1; iter <= cfg.max_outer_penalized; ++iter) {
    const auto surr_b = smm_baseband_surrogates(w, x, channels, c);
    const auto cf_b = closed_form_baseband_smm(surr_b, x, cfg.power_budget_watts,
                                               cfg.bisection_tol);
    if (surr_b.value(cf_b.W) <= surr_b.value(w)) w = cf_b.W;

    const auto surr_h = smm_holo_vectorized(w, x, channels, c);
    const auto cf_h = closed_form_holo_smm(surr_h, chi, rho, cfg.power_budget_watts,
                                           cfg.bisection_tol);
    const RealVec x_vec = vec(x);
    const Real before = smm_holo_value(surr_h, x_vec) +
                        rho * (x_vec - chi).squaredNorm();
    const Real after = smm_holo_value(surr_h, cf_h.x) +
                       rho * (cf_h.x - chi).squaredNorm();
    if (after <= before) x = unvec(cf_h.x, x.rows(), x.cols());

    chi = project_amplitudes(vec(x), bounds);
    const Real penalty = penalty_term(x, chi);
    const Real objective = soft_min_objective(w, x, channels, c);
    result.trace.points.push_back({iter, penalized_soft(w, x, chi, rho, c, channels),
                                   min_rate(w, x, channels), sum_rate(w, x, channels),
                                   penalty, rho, detail::elapsed_ms(start)});
    if (cfg.record_iterates) result.iterates.push_back({w, x, chi, rho});
    const bool done = penalty < cfg.penalty_stop &&
                      std::abs(objective - objective_prev) < cfg.objective_stabilize_tol;
    if (penalty >= cfg.penalty_stop && penalty > cfg.penalty_trigger * penalty_prev) {
      rho *= cfg.penalty_growth;
    }
    penalty_prev = penalty;
    objective_prev = objective;
    if (done) {
      result.trace.hit_iteration_cap = false;
      break;
    }
  }
  result.W = std::move(w);
  result.X = std::move(x);
  detail::finalize_penalized(result, bounds, cfg.power_budget_watts);
  return result;
}

}  // namespace holobeam
