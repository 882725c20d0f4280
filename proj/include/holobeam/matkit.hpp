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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "holobeam/common.hpp"

namespace holobeam {

// Dense complex/real matrix kernels shared by the whole library. A matrix is
// accepted as Hermitian PSD when it equals its adjoint to 1e-12 of its scale
// and its smallest eigenvalue is >= -1e-10 times its largest.

/// X * X^H. Hermitian PSD by construction.
inline Mat gram(const Mat& x) { return x * x.adjoint(); }

inline RealMat gram(const RealMat& x) { return x * x.transpose(); }

inline bool is_hermitian(const Mat& a, Real tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const Real scale = std::max<Real>(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Symmetrize against round-off drift: (A + A^H) / 2.
inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

inline RealMat symmetrize(const RealMat& a) { return 0.5 * (a + a.transpose()); }

/// ln|A| for Hermitian positive definite A, in nats. Cholesky is the fast
/// path; falls back to an eigendecomposition near singularity.
inline Real logdet_hpd(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgumentError("logdet_hpd: matrix must be square");
  }
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) {
    const auto& l = llt.matrixLLT();
    Real acc = 0.0;
    bool ok = true;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const Real d = l(i, i).real();
      if (!(d > 0.0) || !std::isfinite(d)) {
        ok = false;
        break;
      }
      acc += std::log(d);
    }
    if (ok) return 2.0 * acc;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const Real ev = es.eigenvalues()(i);
    if (ev <= 0.0 || !std::isfinite(ev)) {
      throw NotPositiveDefiniteError("logdet_hpd: eigenvalue " +
                                     std::to_string(ev) + " is not positive");
    }
    acc += std::log(ev);
  }
  return acc;
}

inline Real logdet_hpd(const RealMat& a) { return logdet_hpd(Mat(a.cast<Complex>())); }

/// Hermitian PSD square root via eigendecomposition. Eigenvalues below
/// -1e-10 of the spectral norm are rejected; small negatives are clamped to
/// zero before taking the root.
inline Mat psd_sqrt(const Mat& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgumentError("psd_sqrt: matrix must be square");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
  const RealVec evs = es.eigenvalues();
  const Real top = std::max<Real>(evs.cwiseAbs().maxCoeff(), 0.0);
  if (evs.minCoeff() < -1e-8 * std::max<Real>(top, 1e-300)) {
    throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(evs.minCoeff()) +
                      " below PSD tolerance");
  }
  RealVec roots(evs.size());
  for (Eigen::Index i = 0; i < evs.size(); ++i) {
    roots(i) = evs(i) > 0.0 ? std::sqrt(evs(i)) : 0.0;
  }
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

inline RealMat psd_sqrt(const RealMat& a) { return psd_sqrt(Mat(a.cast<Complex>())).real(); }

/// Standard Kronecker product, (p*m) x (q*n) for A p x q and B m x n.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Derived>& b) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Column-major stacking of a matrix into a vector.
inline Vec vec(const Mat& x) { return Vec(Eigen::Map<const Vec>(x.data(), x.size())); }

inline RealVec vec(const RealMat& x) {
  return RealVec(Eigen::Map<const RealVec>(x.data(), x.size()));
}

inline Mat unvec(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidArgumentError("unvec: size mismatch");
  }
  return Mat(Eigen::Map<const Mat>(v.data(), rows, cols));
}

inline RealMat unvec(const RealVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw InvalidArgumentError("unvec: size mismatch");
  }
  return RealMat(Eigen::Map<const RealMat>(v.data(), rows, cols));
}

/// <X, Y> = trace(X^H Y).
inline Complex inner(const Mat& x, const Mat& y) {
  return (x.adjoint() * y).trace();
}

inline Real inner(const RealMat& x, const RealMat& y) {
  return (x.transpose() * y).trace();
}

/// Solve A Z = B for Hermitian positive definite A. If the factorization
/// fails, a jitter of 1e-12 * trace(A)/n is added to the diagonal once.
inline Mat hpd_solve(const Mat& a, const Mat& b) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  const Real jitter = 1e-12 * std::abs(a.trace()) / static_cast<Real>(a.rows());
  Mat aj = a + jitter * Mat::Identity(a.rows(), a.cols());
  Eigen::LLT<Mat> llt2(aj);
  if (llt2.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("hpd_solve: Cholesky failed after jitter");
  }
  return llt2.solve(b);
}

inline Mat hpd_inverse(const Mat& a) {
  return hpd_solve(a, Mat::Identity(a.rows(), a.cols()));
}

}  // namespace holobeam
