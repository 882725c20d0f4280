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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace holobeam {

using Real = double;
using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Set of per-user baseband precoders, one K x D complex matrix per user.
using BasebandSet = std::vector<Mat>;

inline constexpr Real kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class DomainViolationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class NoBracketError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDistanceError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG
//
// xoshiro256++ with splitmix64 seed expansion. All distribution conversions
// are written out explicitly so that a given seed produces the same stream
// on every platform, independent of the standard library.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  Real uniform() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (cosine branch).
  Real normal() {
    const Real u1 = 1.0 - uniform();  // (0, 1]
    const Real u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Circularly symmetric complex normal CN(0, 1).
  Complex cnormal() {
    const Real u1 = 1.0 - uniform();
    const Real u2 = uniform();
    const Real mag = std::sqrt(-std::log(u1));
    return Complex(mag * std::cos(2.0 * kPi * u2), mag * std::sin(2.0 * kPi * u2));
  }

  /// Independent child stream keyed by (this stream's seed words, id).
  Rng fork(std::uint64_t id) const {
    std::uint64_t sm = state_[0] ^ (0x632be59bd9b4e019ULL * (id + 1));
    sm ^= state_[2];
    return Rng(splitmix64(sm));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace holobeam
