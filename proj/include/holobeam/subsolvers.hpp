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

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "holobeam/matkit.hpp"

namespace holobeam {

// Inner solvers shared by the outer algorithms: an epigraph-form barrier
// interior-point method for the max-min quadratic subproblems, and the
// bisection used to pin the power-constraint multiplier of the closed forms.

/// Concave quadratic q(z) = constant + 2 linear^T z - z^T curvature z.
struct QuadObjective {
  Real constant = 0.0;
  RealVec linear;
  RealMat curvature;  // PSD

  Real value(const RealVec& z) const {
    return constant + 2.0 * linear.dot(z) - z.dot(curvature * z);
  }
};

/// max_z min_nu q_nu(z)  s.t.  z^T power_curvature z <= power_budget,
/// and optionally 0 <= z <= upper_bounds elementwise.
struct MaxMinQpProblem {
  std::vector<QuadObjective> objectives;
  RealMat power_curvature;
  Real power_budget = 0.0;
  std::optional<RealVec> upper_bounds;
};

struct SolverReport {
  RealVec solution;
  Real objective = 0.0;     // min over the quadratics at the solution
  int iterations = 0;       // Newton steps
  Real max_violation = 0.0; // positive part of any constraint residual
  Real kkt_residual = 0.0;  // duality-gap estimate of the final barrier stage
  bool converged = false;
};

class MaxIterationsError : public Error {
 public:
  MaxIterationsError(const std::string& what, SolverReport best)
      : Error(what), best_iterate(std::move(best)) {}
  SolverReport best_iterate;
};

// Real/imaginary stacking isomorphism used at the solver boundary: a complex
// column w maps to [Re w; Im w], a Hermitian form to the symmetric form below
// (PSD is preserved).

inline RealMat realify_hermitian(const Mat& c) {
  const auto n = c.rows();
  RealMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = c.real();
  out.topRightCorner(n, n) = -c.imag();
  out.bottomLeftCorner(n, n) = c.imag();
  out.bottomRightCorner(n, n) = c.real();
  return out;
}

inline RealVec realify_columns(const Mat& w) {
  const auto k = w.rows();
  RealVec out(2 * k * w.cols());
  for (Eigen::Index d = 0; d < w.cols(); ++d) {
    out.segment(2 * k * d, k) = w.col(d).real();
    out.segment(2 * k * d + k, k) = w.col(d).imag();
  }
  return out;
}

inline Mat complexify_columns(const RealVec& z, Eigen::Index k, Eigen::Index cols) {
  Mat w(k, cols);
  for (Eigen::Index d = 0; d < cols; ++d) {
    w.col(d).real() = z.segment(2 * k * d, k);
    w.col(d).imag() = z.segment(2 * k * d + k, k);
  }
  return w;
}

/// Bisection for the multiplier tau of a power equation g(tau) = P, where g
/// is continuous and strictly decreasing with g(0) > P. The upper bracket is
/// found by doubling from 1.
inline Real bisection_tau(const std::function<Real(Real)>& g, Real budget, Real tol,
                          int max_iter = 500) {
  Real g0 = g(0.0);
  if (!(g0 > budget)) {
    throw NoBracketError("bisection_tau: g(0) <= P, unconstrained branch applies");
  }
  Real lo = 0.0;
  Real hi = 1.0;
  int doublings = 0;
  while (g(hi) > budget) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw NoBracketError("bisection_tau: no upper bracket found");
    }
  }
  for (int it = 0; it < max_iter; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real val = g(mid);
    if (std::abs(val - budget) <= tol * budget) return mid;
    if (val > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) return 0.5 * (lo + hi);
  }
  throw MaxIterationsError("bisection_tau: residual above tolerance after max_iter",
                           SolverReport{});
}

namespace detail {

struct BarrierWorkspace {
  const MaxMinQpProblem* problem = nullptr;
  int n = 0;  // free variables (excludes the epigraph slack)

  // Constraint values at (z, t): epigraph terms, power, then box terms.
  RealVec constraint_values(const RealVec& z, Real t) const {
    const auto& p = *problem;
    const int m_obj = static_cast<int>(p.objectives.size());
    const int m_box = p.upper_bounds ? 2 * n : 0;
    RealVec g(m_obj + 1 + m_box);
    for (int i = 0; i < m_obj; ++i) g(i) = p.objectives[i].value(z) - t;
    g(m_obj) = p.power_budget - z.dot(p.power_curvature * z);
    if (p.upper_bounds) {
      for (int i = 0; i < n; ++i) {
        g(m_obj + 1 + i) = z(i);
        g(m_obj + 1 + n + i) = (*p.upper_bounds)(i)-z(i);
      }
    }
    return g;
  }

  bool strictly_feasible(const RealVec& z, Real t, Real margin = 0.0) const {
    const RealVec g = constraint_values(z, t);
    return g.minCoeff() > margin;
  }

  Real barrier(const RealVec& z, Real t, Real kappa) const {
    const RealVec g = constraint_values(z, t);
    if (g.minCoeff() <= 0.0) return std::numeric_limits<Real>::infinity();
    return -kappa * t - g.array().log().sum();
  }

  // Gradient and Hessian of the barrier in x = [z; t].
  void derivatives(const RealVec& z, Real t, Real kappa, RealVec& grad,
                   RealMat& hess) const {
    const auto& p = *problem;
    const int m_obj = static_cast<int>(p.objectives.size());
    grad = RealVec::Zero(n + 1);
    hess = RealMat::Zero(n + 1, n + 1);
    grad(n) = -kappa;
    for (int i = 0; i < m_obj; ++i) {
      const auto& q = p.objectives[i];
      const Real gi = q.value(z) - t;
      RealVec u(n + 1);
      u.head(n) = 2.0 * (q.linear - q.curvature * z);
      u(n) = -1.0;
      grad -= u / gi;
      hess += (u * u.transpose()) / (gi * gi);
      hess.topLeftCorner(n, n) += (2.0 / gi) * q.curvature;
    }
    {
      const Real gp = p.power_budget - z.dot(p.power_curvature * z);
      RealVec u = RealVec::Zero(n + 1);
      u.head(n) = -2.0 * (p.power_curvature * z);
      grad -= u / gp;
      hess += (u * u.transpose()) / (gp * gp);
      hess.topLeftCorner(n, n) += (2.0 / gp) * p.power_curvature;
    }
    if (p.upper_bounds) {
      for (int i = 0; i < n; ++i) {
        const Real lo = z(i);
        const Real hi = (*p.upper_bounds)(i)-z(i);
        grad(i) += -1.0 / lo + 1.0 / hi;
        hess(i, i) += 1.0 / (lo * lo) + 1.0 / (hi * hi);
      }
    }
  }
};

}  // namespace detail

/// Epigraph barrier method: maximize t subject to t <= q_nu(z) and the
/// quadratic/box constraints, with a log barrier on every inequality. The
/// returned KKT residual is the duality-gap estimate m / kappa of the final
/// centering stage; the solve succeeds when it falls below
/// tol * max(1, |objective|).
inline SolverReport solve_maxmin_qp(const MaxMinQpProblem& problem, Real tol = 1e-10,
                                    std::optional<RealVec> warm_start = std::nullopt,
                                    std::ostream* trace = nullptr) {
  if (problem.objectives.empty()) {
    throw InvalidArgumentError("solve_maxmin_qp: no objectives");
  }
  if (!(problem.power_budget > 0.0)) {
    throw InfeasibleError("solve_maxmin_qp: power budget must be > 0");
  }
  const int full_n = static_cast<int>(problem.objectives.front().linear.size());

  // Variables whose box degenerates to {0} are fixed and eliminated.
  std::vector<int> free_idx;
  if (problem.upper_bounds) {
    for (int i = 0; i < full_n; ++i) {
      if ((*problem.upper_bounds)(i) > 1e-12) free_idx.push_back(i);
    }
  } else {
    free_idx.resize(full_n);
    for (int i = 0; i < full_n; ++i) free_idx[i] = i;
  }
  const int n = static_cast<int>(free_idx.size());

  MaxMinQpProblem reduced;
  reduced.power_budget = problem.power_budget;
  auto take = [&](const RealVec& v) {
    RealVec out(n);
    for (int i = 0; i < n; ++i) out(i) = v(free_idx[i]);
    return out;
  };
  auto take_mat = [&](const RealMat& m) {
    RealMat out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) = m(free_idx[i], free_idx[j]);
    return out;
  };
  for (const auto& q : problem.objectives) {
    reduced.objectives.push_back({q.constant, take(q.linear), take_mat(q.curvature)});
  }
  reduced.power_curvature = take_mat(problem.power_curvature);
  if (problem.upper_bounds) reduced.upper_bounds = take(*problem.upper_bounds);

  auto expand = [&](const RealVec& z) {
    RealVec out = RealVec::Zero(full_n);
    for (int i = 0; i < n; ++i) out(free_idx[i]) = z(i);
    return out;
  };
  auto finish = [&](const RealVec& z, int iters, Real gap, bool ok) {
    SolverReport rep;
    rep.solution = expand(z);
    rep.objective = std::numeric_limits<Real>::infinity();
    for (const auto& q : problem.objectives) {
      rep.objective = std::min(rep.objective, q.value(rep.solution));
    }
    rep.iterations = iters;
    rep.kkt_residual = gap;
    Real viol = rep.solution.dot(problem.power_curvature * rep.solution) -
                problem.power_budget;
    if (problem.upper_bounds) {
      viol = std::max(viol, (rep.solution - *problem.upper_bounds).maxCoeff());
      viol = std::max(viol, -rep.solution.minCoeff());
    }
    rep.max_violation = std::max(0.0, viol);
    rep.converged = ok;
    return rep;
  };

  if (n == 0) return finish(RealVec::Zero(0), 0, 0.0, true);

  detail::BarrierWorkspace ws;
  ws.problem = &reduced;
  ws.n = n;

  // Strictly feasible start: box center scaled into the power ball, or the
  // origin when no box is present; optionally the (interiorized) warm start.
  RealVec z = RealVec::Zero(n);
  if (reduced.upper_bounds) {
    z = 0.5 * (*reduced.upper_bounds);
  }
  Real pw = z.dot(reduced.power_curvature * z);
  if (pw >= 0.9 * reduced.power_budget) {
    z *= std::sqrt(0.8 * reduced.power_budget / pw);
  }
  if (warm_start && warm_start->size() == full_n) {
    RealVec zw = take(*warm_start);
    if (reduced.upper_bounds) {
      for (int i = 0; i < n; ++i) {
        const Real hi = (*reduced.upper_bounds)(i);
        zw(i) = std::min(std::max(zw(i), 1e-9 * hi), (1.0 - 1e-9) * hi);
      }
    }
    const Real pww = zw.dot(reduced.power_curvature * zw);
    if (pww > (1.0 - 1e-9) * reduced.power_budget) {
      zw *= std::sqrt((1.0 - 1e-8) * reduced.power_budget / pww);
    }
    bool box_ok = true;
    if (reduced.upper_bounds) {
      box_ok = zw.minCoeff() > 0.0 && ((*reduced.upper_bounds) - zw).minCoeff() > 0.0;
    }
    if (box_ok) z = zw;
  }
  Real qmin = std::numeric_limits<Real>::infinity();
  Real qmax = -std::numeric_limits<Real>::infinity();
  for (const auto& q : reduced.objectives) {
    qmin = std::min(qmin, q.value(z));
    qmax = std::max(qmax, q.value(z));
  }
  Real t = qmin - (1.0 + 0.1 * (qmax - qmin));
  if (!ws.strictly_feasible(z, t)) {
    throw InfeasibleError("solve_maxmin_qp: failed to construct a strictly feasible point");
  }

  const int m_total = static_cast<int>(reduced.objectives.size()) + 1 +
                      (reduced.upper_bounds ? 2 * n : 0);
  const Real scale = std::max(1.0, std::abs(qmin));
  tol = std::max(tol, 1e-11);
  Real kappa = m_total / (10.0 * scale);  // initial gap estimate: 10x scale
  const int max_newton_total = 5000;
  int newton_total = 0;

  RealVec grad;
  RealMat hess;
  Real t_prev_stage = std::numeric_limits<Real>::infinity();
  int stalled_stages = 0;
  for (int stage = 0; stage < 80; ++stage) {
    bool centered = false;
    Real last_decrement = std::numeric_limits<Real>::infinity();
    for (int step = 0; step < 60; ++step) {
      if (newton_total >= max_newton_total) {
        throw MaxIterationsError(
            "solve_maxmin_qp: Newton budget exhausted",
            finish(z, newton_total, m_total / kappa, false));
      }
      ws.derivatives(z, t, kappa, grad, hess);
      Eigen::LDLT<RealMat> ldlt(hess);
      RealVec dir;
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-grad);
      }
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || grad.dot(dir) > 0.0) {
        const Real ridge = 1e-12 * (1.0 + hess.trace() / (n + 1));
        Eigen::LDLT<RealMat> ldlt2(
            RealMat(hess + ridge * RealMat::Identity(n + 1, n + 1)));
        dir = ldlt2.solve(-grad);
        if (!dir.allFinite()) {
          throw SingularMatrixError("solve_maxmin_qp: Newton system is singular");
        }
      }
      ++newton_total;
      const Real decrement = -grad.dot(dir);
      last_decrement = decrement;
      if (decrement * 0.5 <= 1e-8) {
        centered = true;
        break;
      }

      const Real phi0 = ws.barrier(z, t, kappa);
      Real alpha = 1.0;
      int backtracks = 0;
      while (backtracks < 100) {
        const RealVec zc = z + alpha * dir.head(n);
        const Real tc = t + alpha * dir(n);
        if (ws.strictly_feasible(zc, tc) &&
            ws.barrier(zc, tc, kappa) <= phi0 + 0.25 * alpha * grad.dot(dir)) {
          break;
        }
        alpha *= 0.5;
        ++backtracks;
      }
      if (backtracks >= 100) {
        // The line search hit the floating-point floor; accept the point as
        // centered when the remaining decrement is already negligible on the
        // scale of the barrier objective.
        centered = decrement * 0.5 <= 1e-4 * std::max(1.0, std::abs(kappa * t));
        break;
      }
      z += alpha * dir.head(n);
      t += alpha * dir(n);
    }
    if (!centered) {
      centered = last_decrement * 0.5 <= 1e-4 * std::max(1.0, std::abs(kappa * t));
    }
    // Near the floating-point floor exact centering becomes unreachable; a
    // stalled objective across stages certifies convergence just as well,
    // since the central-path objective moves by at most the gap per stage.
    if (std::abs(t - t_prev_stage) <= 1e-11 * std::max(1.0, std::abs(t))) {
      ++stalled_stages;
    } else {
      stalled_stages = 0;
    }
    t_prev_stage = t;
    const Real gap = m_total / kappa;
    if (trace) {
      *trace << "{\"stage\":" << stage << ",\"newton\":" << newton_total
             << ",\"objective\":" << t << ",\"gap\":" << gap
             << ",\"centered\":" << (centered ? "true" : "false") << "}\n";
    }
    if ((centered || stalled_stages >= 2) && gap <= tol * std::max(1.0, std::abs(t))) {
      return finish(z, newton_total, gap, true);
    }
    kappa *= 10.0;
  }
  throw MaxIterationsError("solve_maxmin_qp: barrier stages exhausted",
                           finish(z, newton_total, m_total / kappa, false));
}

}  // namespace holobeam
