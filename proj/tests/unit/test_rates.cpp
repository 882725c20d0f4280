#include "test_support.hpp"

using namespace holobeam;
using test_support::TinyScenario;
using test_support::random_complex;

namespace {

BasebandSet zeros_like(const BasebandSet& w) {
  BasebandSet z;
  for (const auto& w_nu : w) z.push_back(Mat::Zero(w_nu.rows(), w_nu.cols()));
  return z;
}

/// Scalar single-user scenario with hand-set values.
ChannelSet scalar_channel(Real h, Real sigma) {
  ChannelSet set;
  set.sigma = sigma;
  set.H.push_back(Mat::Constant(1, 1, Complex(h, 0)));
  set.users.push_back({});
  return set;
}

}  // namespace

TEST_CASE("interference covariance of silent precoders is sigma I") {
  const TinyScenario s = TinyScenario::make(41);
  const BasebandSet zero = zeros_like(s.w);
  const Mat g = interference_cov(zero, s.x, s.channels.H[0], s.channels.sigma, 0);
  REQUIRE((g - s.channels.sigma * Mat::Identity(g.rows(), g.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-20);
}

TEST_CASE("interference covariance with a single user is sigma I") {
  const TinyScenario s = TinyScenario::make(42, 3, 2, 1, 1);
  const Mat g = interference_cov(s.w, s.x, s.channels.H[0], s.channels.sigma, 0);
  REQUIRE((g - s.channels.sigma * Mat::Identity(g.rows(), g.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-20);
}

TEST_CASE("interference covariance matches the term-by-term oracle") {
  const TinyScenario s = TinyScenario::make(43, 3, 2, 2, 3);
  for (int nu = 0; nu < 3; ++nu) {
    const Mat g = interference_cov(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu);
    Mat oracle = s.channels.sigma * Mat::Identity(2, 2);
    for (int other = 0; other < 3; ++other) {
      if (other == nu) continue;
      const Mat term = s.channels.H[nu] * s.x * s.w[other];
      oracle += term * term.adjoint();
    }
    REQUIRE((g - oracle).cwiseAbs().maxCoeff() <
            1e-12 * std::max(1.0, oracle.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("silent user has zero rate") {
  TinyScenario s = TinyScenario::make(44);
  s.w[0].setZero();
  REQUIRE(user_rate(s.w, s.x, s.channels.H[0], s.channels.sigma, 0) == 0.0);
}

TEST_CASE("scalar rate has the closed form ln(1 + (hxw)^2/sigma)") {
  const Real h = 0.3, x = 0.8, w = 1.7, sigma = 0.05;
  const ChannelSet set = scalar_channel(h, sigma);
  BasebandSet ws = {Mat::Constant(1, 1, Complex(w, 0))};
  RealMat xs = RealMat::Constant(1, 1, x);
  const Real expected = std::log(1.0 + (h * x * w) * (h * x * w) / sigma);
  REQUIRE_THAT(user_rate(ws, xs, set.H[0], sigma, 0),
               Catch::Matchers::WithinAbs(expected, 1e-12));
}

TEST_CASE("rate matches the determinant identity on random instances") {
  const TinyScenario s = TinyScenario::make(45, 3, 2, 2, 2);
  for (int nu = 0; nu < 2; ++nu) {
    const Mat g = interference_cov(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu);
    const Mat sig = gram(Mat(s.channels.H[nu] * s.x * s.w[nu]));
    // direct route: ln|I + S G^{-1}|
    const Mat m = Mat::Identity(2, 2) + sig * g.inverse();
    const Real direct = std::log(std::abs(m.determinant()));
    REQUIRE_THAT(user_rate(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu),
                 Catch::Matchers::WithinAbs(direct, 1e-9));
  }
}

TEST_CASE("min and sum of silent precoders vanish") {
  TinyScenario s = TinyScenario::make(46);
  const BasebandSet zero = zeros_like(s.w);
  REQUIRE(min_rate(zero, s.x, s.channels) == 0.0);
  REQUIRE(sum_rate(zero, s.x, s.channels) == 0.0);
}

TEST_CASE("symmetric two-user instance has equal rates") {
  TinyScenario s = TinyScenario::make(47, 3, 2, 1, 2);
  s.channels.H[1] = s.channels.H[0];
  s.w[1] = s.w[0];
  const auto rates = user_rates(s.w, s.x, s.channels);
  REQUIRE_THAT(rates[0], Catch::Matchers::WithinAbs(rates[1], 1e-12));
  REQUIRE_THAT(min_rate(s.w, s.x, s.channels), Catch::Matchers::WithinAbs(rates[0], 0.0));
}

TEST_CASE("min <= mean <= max of the per-user rates") {
  const TinyScenario s = TinyScenario::make(48, 3, 2, 1, 4);
  const auto rates = user_rates(s.w, s.x, s.channels);
  const Real mn = min_rate(s.w, s.x, s.channels);
  const Real total = sum_rate(s.w, s.x, s.channels);
  const Real mx = *std::max_element(rates.begin(), rates.end());
  REQUIRE(mn <= total / 4 + 1e-15);
  REQUIRE(total / 4 <= mx + 1e-15);
  for (Real r : rates) REQUIRE(r >= 0.0);
}

TEST_CASE("Pi is the identity for a silent user") {
  TinyScenario s = TinyScenario::make(49);
  s.w[0].setZero();
  const Mat pi = scaled_pi(s.w, s.x, s.channels.H[0], s.channels.sigma, 0, 0.5);
  REQUIRE((pi - Mat::Identity(pi.rows(), pi.cols())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("scalar Pi at c = 1 is 1/(1 + (hxw)^2/G)") {
  const Real h = 0.4, x = 0.9, w = 1.1, sigma = 0.2;
  const ChannelSet set = scalar_channel(h, sigma);
  BasebandSet ws = {Mat::Constant(1, 1, Complex(w, 0))};
  RealMat xs = RealMat::Constant(1, 1, x);
  const Real v2 = (h * x * w) * (h * x * w);
  const Mat pi = scaled_pi(ws, xs, set.H[0], sigma, 0, 1.0);
  REQUIRE_THAT(pi(0, 0).real(),
               Catch::Matchers::WithinAbs(1.0 / (1.0 + v2 / sigma), 1e-12));
}

TEST_CASE("both Pi forms agree to 1e-9") {
  for (std::uint64_t seed : {50u, 51u, 52u}) {
    const TinyScenario s = TinyScenario::make(seed, 3, 2, 2, 2);
    for (Real c : {1.0, 0.5, 0.1}) {
      for (int nu = 0; nu < 2; ++nu) {
        const Mat a = scaled_pi(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu, c);
        const Mat b = scaled_pi_inverse_form(s.w, s.x, s.channels.H[nu],
                                             s.channels.sigma, nu, c);
        REQUIRE((a - b).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("Pi eigenvalues lie in (0, 1]") {
  const TinyScenario s = TinyScenario::make(53, 3, 2, 2, 3);
  for (Real c : {1.0, 0.5, 0.1}) {
    for (int nu = 0; nu < 3; ++nu) {
      const Mat pi = scaled_pi(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu, c);
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(pi), Eigen::EigenvaluesOnly);
      REQUIRE(es.eigenvalues().minCoeff() > 0.0);
      REQUIRE(es.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("soft objective of silent precoders is D ln Nu") {
  TinyScenario s = TinyScenario::make(54, 3, 2, 2, 3);
  const BasebandSet zero = zeros_like(s.w);
  REQUIRE_THAT(soft_min_objective(zero, s.x, s.channels, 0.5),
               Catch::Matchers::WithinAbs(2.0 * std::log(3.0), 1e-12));
}

TEST_CASE("single-user soft objective is minus the scaled rate") {
  const TinyScenario s = TinyScenario::make(55, 3, 2, 2, 1);
  for (Real c : {1.0, 0.5, 0.1}) {
    const Real lhs = soft_min_objective(s.w, s.x, s.channels, c);
    const Real rhs = -scaled_user_rate(s.w, s.x, s.channels.H[0], s.channels.sigma, 0, c);
    REQUIRE_THAT(lhs, Catch::Matchers::WithinAbs(rhs, 1e-10));
  }
}

TEST_CASE("soft objective is sandwiched by the scaled min rate") {
  int checked = 0;
  for (std::uint64_t seed = 60; seed < 80; ++seed) {
    for (int users : {2, 4}) {
      const TinyScenario s = TinyScenario::make(seed, 3, 2, 1, users);
      for (Real c : {1.0, 0.5, 0.1}) {
        const Real fc = min_scaled_rate(s.w, s.x, s.channels, c);
        const Real soft = -soft_min_objective(s.w, s.x, s.channels, c);
        REQUIRE(fc > soft);
        REQUIRE(soft > fc - std::log(static_cast<Real>(users)));
        ++checked;
      }
    }
  }
  REQUIRE(checked == 120);
}

TEST_CASE("scaled rate at c = 1 is the rate and grows as c shrinks") {
  const TinyScenario s = TinyScenario::make(56, 3, 2, 2, 2);
  for (int nu = 0; nu < 2; ++nu) {
    const Real r1 = scaled_user_rate(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu, 1.0);
    const Real r = user_rate(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu);
    REQUIRE_THAT(r1, Catch::Matchers::WithinAbs(r, 1e-11));
    const Real r05 = scaled_user_rate(s.w, s.x, s.channels.H[nu], s.channels.sigma, nu, 0.5);
    REQUIRE(r05 >= r1);
  }
  TinyScenario z = TinyScenario::make(57);
  z.w[0].setZero();
  REQUIRE(scaled_user_rate(z.w, z.x, z.channels.H[0], z.channels.sigma, 0, 0.3) == 0.0);
}

TEST_CASE("penalty vanishes when chi matches vec(X)") {
  const TinyScenario s = TinyScenario::make(58);
  const RealVec chi = vec(s.x);
  REQUIRE_THAT(penalized_sum(s.w, s.x, chi, 2.0, s.channels),
               Catch::Matchers::WithinAbs(sum_rate(s.w, s.x, s.channels), 1e-12));
  REQUIRE_THAT(penalized_soft(s.w, s.x, chi, 2.0, 0.5, s.channels),
               Catch::Matchers::WithinAbs(soft_min_objective(s.w, s.x, s.channels, 0.5),
                                          1e-12));
}

TEST_CASE("nonpositive rho is rejected") {
  const TinyScenario s = TinyScenario::make(59);
  const RealVec chi = vec(s.x);
  REQUIRE_THROWS_AS(penalized_sum(s.w, s.x, chi, 0.0, s.channels), InvalidArgumentError);
  REQUIRE_THROWS_AS(penalized_soft(s.w, s.x, chi, -1.0, 0.5, s.channels),
                    InvalidArgumentError);
}

TEST_CASE("penalty equals the squared Euclidean distance") {
  const TinyScenario s = TinyScenario::make(61);
  Rng rng(62);
  RealVec chi(vec(s.x).size());
  for (Eigen::Index i = 0; i < chi.size(); ++i) chi(i) = rng.uniform();
  Real oracle = 0.0;
  const RealVec x_vec = vec(s.x);
  for (Eigen::Index i = 0; i < chi.size(); ++i) {
    oracle += (x_vec(i) - chi(i)) * (x_vec(i) - chi(i));
  }
  const Real rho = 1.7;
  REQUIRE_THAT(sum_rate(s.w, s.x, s.channels) -
                   penalized_sum(s.w, s.x, chi, rho, s.channels),
               Catch::Matchers::WithinAbs(rho * oracle, 1e-12));
}
