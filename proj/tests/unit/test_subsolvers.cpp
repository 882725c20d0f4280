#include "test_support.hpp"

using namespace holobeam;
using test_support::random_real;

namespace {

/// Refining grid search over a box: level-by-level shrink around the best
/// point. Independent derivative-free oracle for small concave problems.
RealVec grid_search_maxmin(const MaxMinQpProblem& p, const RealVec& lo0,
                           const RealVec& hi0, Real target_step) {
  const int n = static_cast<int>(lo0.size());
  RealVec lo = lo0, hi = hi0;
  RealVec best = 0.5 * (lo + hi);
  auto value = [&](const RealVec& z) {
    if (z.dot(p.power_curvature * z) > p.power_budget) {
      return -std::numeric_limits<Real>::infinity();
    }
    Real v = std::numeric_limits<Real>::infinity();
    for (const auto& q : p.objectives) v = std::min(v, q.value(z));
    return v;
  };
  Real best_value = value(best);
  const int points = 11;
  while ((hi - lo).maxCoeff() > target_step) {
    std::vector<int> idx(n, 0);
    RealVec z(n);
    while (true) {
      for (int i = 0; i < n; ++i) {
        z(i) = lo(i) + (hi(i) - lo(i)) * idx[i] / (points - 1);
      }
      const Real v = value(z);
      if (v > best_value) {
        best_value = v;
        best = z;
      }
      int carry = 0;
      while (carry < n) {
        if (++idx[carry] < points) break;
        idx[carry] = 0;
        ++carry;
      }
      if (carry == n) break;
    }
    const RealVec radius = 0.5 * (hi - lo) / (points - 1) * 2.0;
    for (int i = 0; i < n; ++i) {
      const Real lo_bound = lo0(i), hi_bound = hi0(i);
      lo(i) = std::max(lo_bound, best(i) - radius(i));
      hi(i) = std::min(hi_bound, best(i) + radius(i));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("unconstrained single quadratic peaks at its stationary point") {
  MaxMinQpProblem p;
  QuadObjective q;
  q.constant = 2.0;
  q.linear = RealVec::Zero(3);
  q.linear(0) = 1.0;
  q.curvature = RealMat::Identity(3, 3);
  p.objectives.push_back(q);
  p.power_curvature = RealMat::Identity(3, 3);
  p.power_budget = 1e9;
  const SolverReport rep = solve_maxmin_qp(p, 1e-10);
  REQUIRE(rep.converged);
  // q(z) = 2 + 2 z_0 - ||z||^2, maximized at e_0 with value 3
  REQUIRE_THAT(rep.objective, Catch::Matchers::WithinAbs(3.0, 1e-7));
  REQUIRE_THAT(rep.solution(0), Catch::Matchers::WithinAbs(1.0, 1e-5));
  REQUIRE(std::abs(rep.solution(1)) < 1e-5);
}

TEST_CASE("box clips the scalar maximizer") {
  MaxMinQpProblem p;
  QuadObjective q;  // -(x - 2)^2 = -4 + 4x - x^2
  q.constant = -4.0;
  q.linear = RealVec::Constant(1, 2.0);
  q.curvature = RealMat::Identity(1, 1);
  p.objectives.push_back(q);
  p.power_curvature = RealMat::Identity(1, 1);
  p.power_budget = 1e9;
  p.upper_bounds = RealVec::Constant(1, 1.0);
  const SolverReport rep = solve_maxmin_qp(p, 1e-10);
  REQUIRE(rep.converged);
  REQUIRE_THAT(rep.solution(0), Catch::Matchers::WithinAbs(1.0, 1e-5));
  REQUIRE_THAT(rep.objective, Catch::Matchers::WithinAbs(-1.0, 1e-5));
}

TEST_CASE("two-user four-variable instance matches refining grid search") {
  Rng rng(101);
  for (int trial = 0; trial < 3; ++trial) {
    MaxMinQpProblem p;
    for (int nu = 0; nu < 2; ++nu) {
      QuadObjective q;
      q.constant = rng.uniform(-1.0, 1.0);
      q.linear = random_real(rng, 4, 1);
      const RealMat r = random_real(rng, 4, 4, 0.5);
      q.curvature = r * r.transpose() + 0.5 * RealMat::Identity(4, 4);
      p.objectives.push_back(q);
    }
    p.power_curvature = RealMat::Identity(4, 4);
    p.power_budget = 1e6;  // box-dominated
    p.upper_bounds = RealVec::Constant(4, 1.0);
    const SolverReport rep = solve_maxmin_qp(p, 1e-10);
    REQUIRE(rep.converged);
    const RealVec best =
        grid_search_maxmin(p, RealVec::Zero(4), *p.upper_bounds, 1e-3);
    Real best_value = std::numeric_limits<Real>::infinity();
    for (const auto& q : p.objectives) best_value = std::min(best_value, q.value(best));
    REQUIRE_THAT(rep.objective, Catch::Matchers::WithinAbs(best_value, 2e-3));
    REQUIRE(rep.objective >= best_value - 2e-3);
  }
}

TEST_CASE("active power constraint is respected") {
  Rng rng(102);
  MaxMinQpProblem p;
  QuadObjective q;
  q.constant = 0.0;
  q.linear = RealVec::Constant(3, 5.0);
  q.curvature = 0.1 * RealMat::Identity(3, 3);
  p.objectives.push_back(q);
  p.power_curvature = RealMat::Identity(3, 3);
  p.power_budget = 0.5;
  const SolverReport rep = solve_maxmin_qp(p, 1e-10);
  REQUIRE(rep.converged);
  REQUIRE(rep.solution.squaredNorm() <= 0.5 * (1 + 1e-6));
  REQUIRE(rep.max_violation <= 1e-9);
  // interior-point answer vs. the exact KKT solution of this symmetric case:
  // z = s * ones with s pinned by the power ball
  REQUIRE_THAT(rep.solution(0), Catch::Matchers::WithinAbs(std::sqrt(0.5 / 3.0), 1e-4));
}

TEST_CASE("no objective value falls below the reported min") {
  Rng rng(103);
  MaxMinQpProblem p;
  for (int nu = 0; nu < 3; ++nu) {
    QuadObjective q;
    q.constant = rng.uniform(-1.0, 1.0);
    q.linear = random_real(rng, 5, 1);
    const RealMat r = random_real(rng, 5, 5, 0.4);
    q.curvature = r * r.transpose() + 0.2 * RealMat::Identity(5, 5);
    p.objectives.push_back(q);
  }
  p.power_curvature = RealMat::Identity(5, 5);
  p.power_budget = 4.0;
  p.upper_bounds = RealVec::Constant(5, 0.8);
  const SolverReport rep = solve_maxmin_qp(p, 1e-9);
  for (const auto& q : p.objectives) {
    REQUIRE(q.value(rep.solution) >= rep.objective - 1e-12);
  }
  REQUIRE(rep.kkt_residual <= 1e-9 * std::max(1.0, std::abs(rep.objective)));
}

TEST_CASE("warm starts never lose ground") {
  Rng rng(104);
  MaxMinQpProblem p;
  for (int nu = 0; nu < 2; ++nu) {
    QuadObjective q;
    q.constant = 0.0;
    q.linear = random_real(rng, 4, 1);
    const RealMat r = random_real(rng, 4, 4, 0.6);
    q.curvature = r * r.transpose() + 0.3 * RealMat::Identity(4, 4);
    p.objectives.push_back(q);
  }
  p.power_curvature = RealMat::Identity(4, 4);
  p.power_budget = 2.0;
  const SolverReport cold = solve_maxmin_qp(p, 1e-10);
  const SolverReport warm = solve_maxmin_qp(p, 1e-10, cold.solution);
  REQUIRE(warm.objective >= cold.objective - 1e-9);
}

TEST_CASE("degenerate box entries are fixed at zero") {
  MaxMinQpProblem p;
  QuadObjective q;
  q.constant = 0.0;
  q.linear = RealVec::Constant(3, 1.0);
  q.curvature = RealMat::Identity(3, 3);
  p.objectives.push_back(q);
  p.power_curvature = RealMat::Identity(3, 3);
  p.power_budget = 1e9;
  RealVec ub = RealVec::Constant(3, 10.0);
  ub(1) = 0.0;
  p.upper_bounds = ub;
  const SolverReport rep = solve_maxmin_qp(p, 1e-10);
  REQUIRE(rep.solution(1) == 0.0);
  REQUIRE_THAT(rep.solution(0), Catch::Matchers::WithinAbs(1.0, 1e-5));
}

TEST_CASE("bisection solves 4/(1+tau) = 1 at tau = 3") {
  const Real tau = bisection_tau([](Real t) { return 4.0 / (1.0 + t); }, 1.0, 1e-12);
  REQUIRE_THAT(tau, Catch::Matchers::WithinAbs(3.0, 1e-9));
}

TEST_CASE("bisection solves exp(-tau) = 1/e at tau = 1") {
  const Real tau = bisection_tau([](Real t) { return std::exp(-t); }, std::exp(-1.0),
                                 1e-12);
  REQUIRE_THAT(tau, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("bisection meets the residual tolerance on a matrix power curve") {
  Rng rng(105);
  const Mat c = test_support::random_hpd(rng, 4, 0.5);
  const Mat g = test_support::random_hpd(rng, 4, 0.0);
  const Mat b = test_support::random_complex(rng, 4, 2);
  auto power = [&](Real tau) {
    const Mat w = (c + tau * g).inverse() * b;
    return (g * w * w.adjoint()).trace().real();
  };
  const Real budget = 0.25 * power(0.0);
  const Real tau = bisection_tau(power, budget, 1e-8);
  REQUIRE(std::abs(power(tau) - budget) <= 1e-8 * budget);
}

TEST_CASE("bisection refuses an inactive constraint") {
  REQUIRE_THROWS_AS(bisection_tau([](Real t) { return 1.0 / (1.0 + t); }, 2.0, 1e-10),
                    NoBracketError);
}
