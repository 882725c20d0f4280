#include "test_support.hpp"

using namespace holobeam;

namespace {

RhsGeometry default_geom(int m_side = 4, int feeds = 2) {
  ChannelParams params;
  const Real lambda = params.wavelength();
  return RhsGeometry::make(m_side, feeds, 0.25 * lambda, lambda);
}

}  // namespace

TEST_CASE("path loss at reference distances") {
  REQUIRE_THAT(path_loss_db(1.0), Catch::Matchers::WithinAbs(53.22, 1e-12));
  REQUIRE_THAT(path_loss_db(10.0), Catch::Matchers::WithinAbs(88.52, 1e-12));
  REQUIRE_THAT(path_loss_db(100.0), Catch::Matchers::WithinAbs(123.82, 1e-12));
  REQUIRE_THROWS_AS(path_loss_db(0.0), NonPositiveDistanceError);
  REQUIRE_THROWS_AS(path_loss_db(-3.0), NonPositiveDistanceError);
}

TEST_CASE("noise power for the default parameters") {
  ChannelParams params;
  // -174 dBm/Hz over 100 MHz -> -94 dBm -> 10^(-12.4) W
  REQUIRE_THAT(params.noise_power_watts(),
               Catch::Matchers::WithinRel(std::pow(10.0, -12.4), 1e-12));
}

TEST_CASE("transmit response is flat at broadside") {
  const RhsGeometry geom = default_geom();
  const Vec a = array_response_tx(geom, 1.1, 0.0);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    REQUIRE(std::abs(a(i) - Complex(0.25, 0)) < 1e-14);  // 1/M with M = 4
  }
}

TEST_CASE("transmit response is unit norm") {
  const RhsGeometry geom = default_geom();
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec a = array_response_tx(geom, rng.uniform(0.0, 2.0 * kPi),
                                    rng.uniform(-0.5 * kPi, 0.5 * kPi));
    REQUIRE_THAT(a.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("transmit response phases advance by pi/2 along x at endfire") {
  ChannelParams params;
  const Real lambda = params.wavelength();
  const RhsGeometry geom = RhsGeometry::make(2, 1, 0.25 * lambda, lambda);
  const Vec a = array_response_tx(geom, 0.0, 0.5 * kPi);
  // column-major ordering: (m=0,mp=0), (m=1,mp=0), (m=0,mp=1), (m=1,mp=1)
  REQUIRE_THAT(std::arg(a(1) / a(0)), Catch::Matchers::WithinAbs(0.5 * kPi, 1e-12));
  REQUIRE_THAT(std::arg(a(3) / a(2)), Catch::Matchers::WithinAbs(0.5 * kPi, 1e-12));
  REQUIRE(std::abs(a(2) - a(0)) < 1e-14);  // no advance along y when phi = 0
}

TEST_CASE("receive response endpoints") {
  const Real lambda = 0.0107;
  const Vec flat = array_response_rx(3, 0.5 * lambda, lambda, 0.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    REQUIRE(std::abs(flat(i) - Complex(1.0 / std::sqrt(3.0), 0)) < 1e-14);
  }
  const Vec alt = array_response_rx(2, 0.5 * lambda, lambda, 0.5 * kPi);
  REQUIRE(std::abs(alt(0) - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-12);
  REQUIRE(std::abs(alt(1) - Complex(-1.0 / std::sqrt(2.0), 0)) < 1e-12);
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec a = array_response_rx(5, 0.5 * lambda, lambda, rng.uniform(0.0, 2 * kPi));
    REQUIRE_THAT(a.norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("single unit-gain path gives the rank-1 outer product") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  params.rx_antennas = 2;
  const Real beta = 80.0;
  PathComponent path;
  path.gain = Complex(1, 0);
  path.aod_az = 0.7;
  path.aod_el = -0.3;
  path.aoa_az = 2.2;
  const Mat h = assemble_channel(geom, params, {path}, beta);
  const Vec ar = array_response_rx(2, params.rx_spacing(), geom.wavelength, path.aoa_az);
  const Vec at = array_response_tx(geom, path.aod_az, path.aod_el);
  const Mat expected = std::sqrt(std::pow(10.0, -beta / 10.0)) *
                       std::sqrt(16.0 * 2.0 / 1.0) * (ar * at.adjoint());
  REQUIRE((h - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("channel sampling is deterministic in the seed") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  params.rx_antennas = 2;
  const ChannelSet a = sample_channel_set(99, params, geom, 3);
  const ChannelSet b = sample_channel_set(99, params, geom, 3);
  REQUIRE(a.sigma == b.sigma);
  for (int nu = 0; nu < 3; ++nu) {
    REQUIRE((a.H[nu] - b.H[nu]).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.users[nu].distance == b.users[nu].distance);
  }
  const ChannelSet c = sample_channel_set(100, params, geom, 3);
  REQUIRE((a.H[0] - c.H[0]).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("channel rank is bounded by the path count") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  params.rx_antennas = 4;
  params.path_count = 2;
  const ChannelSet set = sample_channel_set(7, params, geom, 4);
  for (const auto& h : set.H) {
    Eigen::JacobiSVD<Mat> svd(h);
    const auto& sv = svd.singularValues();
    for (Eigen::Index i = 2; i < sv.size(); ++i) {
      REQUIRE(sv(i) < 1e-10 * sv(0));
    }
  }
}

TEST_CASE("mean channel energy matches the path-loss scaling over 500 draws") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  params.rx_antennas = 2;
  Real acc = 0.0;
  const int draws = 500;
  for (int s = 1; s <= draws; ++s) {
    const ChannelSet set = sample_channel_set(s, params, geom, 1);
    const Real beta = path_loss_db(set.users[0].distance);
    const Real expected = std::pow(10.0, -beta / 10.0) * geom.element_count() *
                          params.rx_antennas;
    acc += set.H[0].squaredNorm() / expected;
  }
  REQUIRE_THAT(acc / draws, Catch::Matchers::WithinAbs(1.0, 0.1));
}

TEST_CASE("users stay inside the cell with the distance floor") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  for (int s = 1; s <= 50; ++s) {
    const ChannelSet set = sample_channel_set(s, params, geom, 2);
    for (const auto& u : set.users) {
      const Real horizontal = std::hypot(u.x, u.y);
      REQUIRE(horizontal >= params.min_distance_m - 1e-9);
      REQUIRE(horizontal <= params.cell_radius_m + 1e-9);
      REQUIRE(u.theta_los >= 0.0);
      REQUIRE(u.theta_los < 0.5 * kPi);
    }
  }
}

TEST_CASE("channel replay roundtrips through JSON") {
  const RhsGeometry geom = default_geom();
  ChannelParams params;
  params.rx_antennas = 2;
  const ChannelSet set = sample_channel_set(123, params, geom, 2);
  const nlohmann::json j = channel_set_to_json(set);
  const ChannelSet back = channel_set_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.seed == set.seed);
  REQUIRE(back.sigma == set.sigma);
  for (int nu = 0; nu < 2; ++nu) {
    REQUIRE((back.H[nu] - set.H[nu]).cwiseAbs().maxCoeff() == 0.0);
  }
}
