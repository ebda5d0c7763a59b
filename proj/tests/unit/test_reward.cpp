#include <doctest.h>

#include <cmath>
#include <random>

#include "crowdmarket/error.hpp"
#include "crowdmarket/reward.hpp"
#include "crowdmarket/scenario.hpp"
#include "support.hpp"

using namespace crowdmarket;
using testing::single_user;
using testing::symmetric_pair;

namespace {

const MarketParams kRingParams{1.0, 1.0, 4.0, 0.5};

bool has_warning(const RewardSolution& sol, std::string_view needle) {
  for (const auto& w : sol.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("reward") {

TEST_CASE("single user: both regimes give r* = 2/3") {
  const MarketInstance one = single_user();
  const RewardSolution disc = discriminatory_reward(one);
  CHECK(disc.r[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(disc.equilibrium.x[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(disc.revenue == doctest::Approx(25.0 / 12.0).epsilon(1e-12));
  CHECK(disc.warnings.empty());

  const RewardSolution uni = uniform_reward(one);
  CHECK(uni.r[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(uni.revenue == doctest::Approx(disc.revenue).epsilon(1e-12));
  CHECK(average_discriminatory_reward(one) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("solution invariants") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 12);
    for (const RewardSolution& sol : {discriminatory_reward(inst), uniform_reward(inst)}) {
      CHECK(std::abs(sol.revenue - csp_revenue(inst, sol.equilibrium.x.values(), sol.r)) <=
            1e-9);
      CHECK(sol.mu_utilities.size() == static_cast<Eigen::Index>(inst.size()));
      CHECK(sol.model_interior);
      CHECK(sol.model_revenue == doctest::Approx(sol.revenue));
    }
    CHECK(uniform_reward(inst).r.is_uniform());
  }
}

TEST_CASE("symmetric market: equal rewards and equal revenues") {
  const MarketInstance ring = testing::symmetric_ring(6, 0.4, kRingParams);
  const RewardSolution disc = discriminatory_reward(ring);
  const RewardSolution uni = uniform_reward(ring);
  for (std::size_t i = 1; i < ring.size(); ++i) {
    CHECK(disc.r[i] == doctest::Approx(disc.r[0]).epsilon(1e-12));
  }
  CHECK(uni.r[0] == doctest::Approx(disc.r[0]).epsilon(1e-12));
  CHECK(uni.revenue == doctest::Approx(disc.revenue).epsilon(1e-12));
  CHECK(average_discriminatory_reward(ring) == doctest::Approx(uni.r[0]).epsilon(1e-12));
}

TEST_CASE("pair market: closed form and grid oracle") {
  const MarketInstance pair = symmetric_pair();
  const RewardSolution disc = discriminatory_reward(pair);
  CHECK(disc.r[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(disc.r[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(disc.equilibrium.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(disc.revenue == doctest::Approx(5.0).epsilon(1e-12));

  const RewardVector grid = brute_force_discriminatory(pair);
  const double step = (kDiscriminatoryOracleRange.hi - kDiscriminatoryOracleRange.lo) /
                      static_cast<double>(kDiscriminatoryOracleSteps - 1);
  CHECK(std::abs(grid[0] - grid[1]) <= step);
  CHECK((grid.values() - disc.r.values()).cwiseAbs().maxCoeff() <= step);
}

TEST_CASE("average reward equals the mean discriminatory reward") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 15);
    CHECK(average_discriminatory_reward(inst) ==
          doctest::Approx(discriminatory_reward(inst).r.mean()).epsilon(1e-12));
  }
}

TEST_CASE("uniform closed form matches a 1-D search") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 10);
    const RewardSolution uni = uniform_reward(inst);
    const double coarse = brute_force_uniform(inst, kUniformOracleRange, 3001);
    const double refined = golden_section_uniform(inst, {coarse - 0.01, coarse + 0.01}, 1e-10);
    CHECK(std::abs(refined - uni.r[0]) <= 1e-4);
  }
}

TEST_CASE("uniform grid oracle examples") {
  const MarketInstance one = single_user();
  const double r = brute_force_uniform(one, {0.0, 2.0}, 200001);
  CHECK(std::abs(r - 2.0 / 3.0) <= 1e-5);

  CHECK(brute_force_uniform(one, {1.25, 1.25}, 11) == 1.25);

  const InfluenceOperator k(one);
  const auto revenue = [&](double v) { return realized_revenue(one, k, RewardVector::uniform(1, v)); };
  const double best = brute_force_uniform(one, {-1.0, 3.0}, 401);
  CHECK(revenue(best) >= revenue(-1.0));
  CHECK(revenue(best) >= revenue(3.0));

  CHECK_THROWS_AS(brute_force_uniform(one, {2.0, 1.0}, 11), InvariantError);
  CHECK_THROWS_AS(brute_force_uniform(one, {0.0, 1.0}, 1), InvariantError);
}

TEST_CASE("discriminatory grid oracle examples") {
  const MarketInstance one = single_user();
  const RewardVector r = brute_force_discriminatory(one, {0.0, 2.0}, 2001);
  CHECK(r[0] == brute_force_uniform(one, {0.0, 2.0}, 2001));

  const MarketInstance four({MuProfile{1, 1}, MuProfile{1, 1}, MuProfile{1, 1}, MuProfile{1, 1}},
                            SocialGraph::empty(4), MarketParams{});
  CHECK_THROWS_AS(brute_force_discriminatory(four), InvariantError);
}

TEST_CASE("discrimination never earns less than a uniform rate") {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 5 + seed % 20);
    const RewardSolution disc = discriminatory_reward(inst);
    const RewardSolution uni = uniform_reward(inst);
    if (!disc.model_interior || !uni.model_interior) continue;
    ++compared;
    CHECK(disc.revenue >= uni.revenue - 1e-9);
  }
  CHECK(compared >= 30);
}

TEST_CASE("first-order conditions hold at the closed forms") {
  constexpr double h = 1e-6;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 3 + seed);
    const RewardSolution disc = discriminatory_reward(inst);
    CHECK(revenue_gradient(inst, disc.r, h).cwiseAbs().maxCoeff() <= 1e-4);
    const RewardSolution uni = uniform_reward(inst);
    CHECK(std::abs(uniform_revenue_derivative(inst, uni.r[0], h)) <= 1e-4);
  }
}

TEST_CASE("closed forms are local maxima") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const MarketInstance inst = testing::interior_instance(seed, 4);
    const RewardSolution disc = discriminatory_reward(inst);
    CHECK_FALSE(has_warning(disc, "Hessian"));
    const Eigen::MatrixXd hess = revenue_hessian(inst, disc.r, 1e-3);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (hess + hess.transpose()));
    CHECK(eig.eigenvalues().maxCoeff() < 0.0);
  }
}

TEST_CASE("incomplete-information bound examples") {
  const SocialGraph g = testing::interior_instance(1, 8).graph();
  const MarketParams no_t{16.0, 0.01, 20.0, 0.0};
  CHECK(incomplete_info_bound(g, no_t, {15.0, 15.0}) == doctest::Approx(0.6).epsilon(1e-12));

  const MarketParams p{16.0, 0.01, 20.0, 0.05};
  const double b = 15.0;
  const double expected = (p.c - 15.0) / 2.0 + p.mu * p.s / 2.0 -
                          p.mu * p.t * (p.mu * p.s + 15.0 - p.c) / (4.0 * b + 2.0 * p.mu * p.t);
  CHECK(incomplete_info_bound(SocialGraph::empty(1), p, {15.0, b}) ==
        doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(incomplete_info_bound(g, MarketParams{15.0, 0.01, 20.0, 0.05}, {15.0, 15.0}),
                  SolverError);
  CHECK_THROWS_AS(incomplete_info_bound(g, p, {15.0, 0.0}), InvariantError);
}

TEST_CASE("bound equals the average reward of the mean-a market") {
  const ScenarioConfig cfg;
  ScenarioConfig small = cfg;
  small.n = 12;
  const MarketInstance inst = generate_random_instance(small).instance;
  const Eigen::VectorXd b = inst.b();
  const double a_bar = 14.5;
  const MarketInstance flat(
      [&] {
        std::vector<MuProfile> p;
        for (Eigen::Index i = 0; i < b.size(); ++i) p.push_back(MuProfile{a_bar, b(i)});
        return p;
      }(),
      inst.graph(), inst.params());
  CHECK(single_reward_for_draw(inst.graph(), inst.params(), a_bar, b) ==
        doctest::Approx(average_discriminatory_reward(flat)).epsilon(1e-10));
  CHECK_THROWS_AS(single_reward_for_draw(inst.graph(), inst.params(), a_bar, b.head(3)),
                  InvariantError);
}

TEST_CASE("Monte Carlo mean of the per-draw reward stays above the bound") {
  ScenarioConfig cfg;
  cfg.n = 20;
  const MarketInstance inst = generate_random_instance(cfg).instance;
  const ExpectationProfile exp = expectation_of(cfg);
  const double bound = incomplete_info_bound(inst.graph(), cfg.params, exp);
  constexpr int kDraws = 1000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < kDraws; ++k) {
    const Eigen::VectorXd b = sample_b(cfg, 1000 + static_cast<std::uint64_t>(k));
    const double r = single_reward_for_draw(inst.graph(), cfg.params, exp.e_a, b);
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt(std::max(0.0, sum_sq / kDraws - mean * mean) / kDraws);
  CHECK(mean >= bound - 2.0 * se);
}

TEST_CASE("1^T X^{-1} 1 is convex over positive definite matrices") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 8;
    auto random_pd = [&] {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
      return Eigen::MatrixXd(a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n));
    };
    const auto f = [&](const Eigen::MatrixXd& m) {
      return Eigen::VectorXd::Ones(n).dot(m.llt().solve(Eigen::VectorXd::Ones(n)));
    };
    const Eigen::MatrixXd x = random_pd();
    const Eigen::MatrixXd y = random_pd();
    const double beta = unit(rng);
    CHECK(f(beta * x + (1.0 - beta) * y) <= beta * f(x) + (1.0 - beta) * f(y) + 1e-9);
  }
}

TEST_CASE("deploying the bound never beats the optimal uniform rate") {
  int above = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioConfig cfg;
    cfg.n = 30;
    cfg.seed = seed;
    const MarketInstance inst = generate_random_instance(cfg).instance;
    REQUIRE(check_assumption2(inst).holds);
    const RewardSolution uni = uniform_reward(inst);
    const RewardSolution bound = bound_reward(inst, expectation_of(cfg));
    CHECK(bound.r.is_uniform());
    if (bound.r[0] > uni.r[0]) ++above;
    CHECK(uni.model_revenue >= bound.model_revenue - 1e-9 * std::abs(uni.model_revenue));
  }
  MESSAGE("bound above optimal uniform rate in " << above << " of 20 instances");
}

TEST_CASE("negative rewards are flagged, and the clamped mode stays nonnegative") {
  const MarketInstance eager = single_user(10.0, 1.0);
  const RewardSolution disc = discriminatory_reward(eager);
  CHECK(disc.r[0] == doctest::Approx(-14.0 / 3.0));
  CHECK(has_warning(disc, "negative reward"));

  const RewardSolution clamped = uniform_reward_nonnegative(eager);
  CHECK(clamped.r[0] >= 0.0);
  CHECK(has_warning(clamped, "re-optimized"));
  const InfluenceOperator k(eager);
  CHECK(clamped.revenue >= realized_revenue(eager, k, RewardVector::uniform(1, 0.0)) - 1e-9);
  CHECK(clamped.revenue >= realized_revenue(eager, k, RewardVector::uniform(1, 0.5)) - 1e-9);

  const RewardSolution plain = uniform_reward_nonnegative(single_user());
  CHECK(plain.r[0] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("regime names") {
  CHECK(parse_regime("disc") == Regime::kDiscriminatory);
  CHECK(parse_regime("discriminatory") == Regime::kDiscriminatory);
  CHECK(parse_regime("uniform") == Regime::kUniform);
  CHECK(parse_regime("bound") == Regime::kUniformBound);
  CHECK(parse_regime("uniform-bound") == Regime::kUniformBound);
  CHECK_THROWS_AS(parse_regime("auction"), ParseError);
  CHECK(to_string(Regime::kUniformBound) == "uniform-bound");
}

}  // TEST_SUITE
