// Builders that restate each closed-form block update as the equivalent
// real-valued quadratic program, so the interior-point solver can be used as
// an independent oracle for the closed forms.

#pragma once

#include "holobeam/holobeam.hpp"

namespace qp_oracles {

using namespace holobeam;

/// Block-diagonal realified curvature over all (user, column) slots.
inline RealMat blockdiag_realified(const std::vector<Mat>& blocks, int slots_per_user,
                                   int users) {
  const auto k = blocks.front().rows();
  const int block = static_cast<int>(2 * k);
  RealMat out = RealMat::Zero(block * slots_per_user * users, block * slots_per_user * users);
  for (int nu = 0; nu < users; ++nu) {
    const RealMat b = realify_hermitian(blocks[nu]);
    for (int s = 0; s < slots_per_user; ++s) {
      const int at = (nu * slots_per_user + s) * block;
      out.block(at, at, block, block) = b;
    }
  }
  return out;
}

/// Sum-rate baseband subproblem as a single concave QP over the stacked
/// real/imaginary precoder variables.
inline MaxMinQpProblem sr_baseband_qp(const SumRateBasebandSurrogate& s, const RealMat& x,
                                      Real budget) {
  const int users = static_cast<int>(s.linear.size());
  const auto k = s.linear.front().rows();
  const auto d = s.linear.front().cols();
  const int block = static_cast<int>(2 * k);
  const int n = users * static_cast<int>(d) * block;

  MaxMinQpProblem p;
  p.power_budget = budget;
  QuadObjective q;
  q.constant = s.constant;
  q.linear = RealVec::Zero(n);
  for (int nu = 0; nu < users; ++nu) {
    for (Eigen::Index col = 0; col < d; ++col) {
      const int at = (nu * static_cast<int>(d) + static_cast<int>(col)) * block;
      q.linear.segment(at, k) = s.linear[nu].col(col).real();
      q.linear.segment(at + k, k) = s.linear[nu].col(col).imag();
    }
  }
  q.curvature = blockdiag_realified(std::vector<Mat>(users, s.curvature),
                                    static_cast<int>(d), users);
  p.objectives.push_back(std::move(q));
  const Mat g = (x.transpose() * x).cast<Complex>();
  p.power_curvature =
      blockdiag_realified(std::vector<Mat>(users, g), static_cast<int>(d), users);
  return p;
}

/// Soft max-min baseband subproblem, negated into a concave maximization.
inline MaxMinQpProblem smm_baseband_qp(const SoftMinBasebandSurrogate& s, const RealMat& x,
                                       Real budget) {
  const int users = static_cast<int>(s.linear.size());
  const auto k = s.linear.front().rows();
  const auto d = s.linear.front().cols();
  const int block = static_cast<int>(2 * k);
  const int n = users * static_cast<int>(d) * block;

  MaxMinQpProblem p;
  p.power_budget = budget;
  QuadObjective q;
  q.constant = -s.constant;
  q.linear = RealVec::Zero(n);
  for (int nu = 0; nu < users; ++nu) {
    for (Eigen::Index col = 0; col < d; ++col) {
      const int at = (nu * static_cast<int>(d) + static_cast<int>(col)) * block;
      q.linear.segment(at, k) = s.linear[nu].col(col).real();
      q.linear.segment(at + k, k) = s.linear[nu].col(col).imag();
    }
  }
  q.curvature = blockdiag_realified(s.curvature, static_cast<int>(d), users);
  p.objectives.push_back(std::move(q));
  const Mat g = (x.transpose() * x).cast<Complex>();
  p.power_curvature =
      blockdiag_realified(std::vector<Mat>(users, g), static_cast<int>(d), users);
  return p;
}

inline RealVec stack_precoders(const BasebandSet& w) {
  const auto k = w.front().rows();
  const auto d = w.front().cols();
  RealVec z(static_cast<Eigen::Index>(w.size()) * 2 * k * d);
  for (std::size_t nu = 0; nu < w.size(); ++nu) {
    z.segment(static_cast<Eigen::Index>(nu) * 2 * k * d, 2 * k * d) = realify_columns(w[nu]);
  }
  return z;
}

/// Penalized holographic subproblem over vec(X). With `minimize` set, the
/// majorant is negated so the epigraph solver still maximizes.
inline MaxMinQpProblem holo_penalized_qp(const VectorizedQuadratic& q, const RealVec& chi,
                                         Real rho, Real budget, bool minimize) {
  const auto n = q.linear.size();
  MaxMinQpProblem p;
  p.power_budget = budget;
  QuadObjective obj;
  obj.constant = (minimize ? -q.constant : q.constant) - rho * chi.squaredNorm();
  obj.linear = q.linear + rho * chi;
  obj.curvature = q.quadratic + rho * RealMat::Identity(n, n);
  p.objectives.push_back(std::move(obj));
  p.power_curvature = q.power;
  return p;
}

}  // namespace qp_oracles
