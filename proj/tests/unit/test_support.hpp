#pragma once

#include <catch2/catch_amalgamated.hpp>

#include "holobeam/holobeam.hpp"

namespace test_support {

using namespace holobeam;

inline Mat random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols, Real scale = 1.0) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.cnormal();
  }
  return m;
}

inline RealMat random_real(Rng& rng, Eigen::Index rows, Eigen::Index cols, Real scale = 1.0) {
  RealMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

inline Mat random_hpd(Rng& rng, Eigen::Index n, Real ridge = 1.0) {
  const Mat r = random_complex(rng, n, n);
  return gram(r) + ridge * Mat::Identity(n, n);
}

/// Small desk-scale scenario shared by several suites.
struct TinyScenario {
  RhsGeometry geom;
  AmplitudeBounds bounds;
  ChannelSet channels;
  BasebandSet w;
  RealMat x;

  static TinyScenario make(std::uint64_t seed, int m_side = 3, int feeds = 2,
                           int streams = 1, int users = 2, Real power = 0.01) {
    TinyScenario s;
    ChannelParams params;
    params.rx_antennas = streams;
    params.path_count = 4;
    const Real lambda = params.wavelength();
    s.geom = RhsGeometry::make(m_side, feeds, 0.25 * lambda, lambda);
    s.channels = sample_channel_set(seed, params, s.geom, users);
    s.bounds = init_amplitude_bounds(s.geom, los_directions(s.channels));
    Rng rng = Rng(seed).fork(0);
    InitPoint init = init_point(s.bounds, feeds, streams, users, power, rng);
    s.w = init.W;
    s.x = init.X;
    return s;
  }
};

}  // namespace test_support
