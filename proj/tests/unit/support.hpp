#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "crowdmarket/market.hpp"
#include "crowdmarket/scenario.hpp"

namespace testing {

using crowdmarket::MarketInstance;
using crowdmarket::MarketParams;
using crowdmarket::MuProfile;
using crowdmarket::SocialGraph;

inline MarketInstance single_user(double a = 2.0, double b = 1.0,
                                  MarketParams params = {1.0, 1.0, 4.0, 1.0}) {
  return MarketInstance({MuProfile{a, b}}, SocialGraph::empty(1), params);
}

// Two identical users with a reciprocal tie g.
inline MarketInstance symmetric_pair(double g = 0.5, MarketParams params = {1.0, 1.0, 4.0, 1.0}) {
  SocialGraph::Matrix w(2, 2);
  w << 0.0, g, g, 0.0;
  return MarketInstance({MuProfile{2.0, 1.0}, MuProfile{2.0, 1.0}}, SocialGraph(w), params);
}

// Ring of n identical users, every tie weight g.
inline MarketInstance symmetric_ring(std::size_t n, double g, MarketParams params) {
  const auto m = static_cast<Eigen::Index>(n);
  SocialGraph::Matrix w = SocialGraph::Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    w(i, (i + 1) % m) = g;
    w((i + 1) % m, i) = g;
  }
  return MarketInstance(std::vector<MuProfile>(n, MuProfile{4.0, 1.5}), SocialGraph(w), params);
}

struct RandomMarketSpec {
  std::size_t min_n = 1;
  std::size_t max_n = 12;
  double density = 0.5;
  // Ties are scaled so that the largest Assumption-1 ratio is drawn
  // uniformly from [0, max_ratio].
  double max_ratio = 0.95;
  double a_lo = 0.0, a_hi = 10.0;
  double b_lo = 0.2, b_hi = 3.0;
  MarketParams params{1.0, 1.0, 4.0, 0.5};
};

// Assorted small markets satisfying Assumption 1.
inline MarketInstance random_market(std::mt19937_64& rng, const RandomMarketSpec& spec = {}) {
  std::uniform_int_distribution<std::size_t> size(spec.min_n, spec.max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = size(rng);
  std::vector<MuProfile> profiles(n);
  for (auto& p : profiles) {
    p.a = spec.a_lo + (spec.a_hi - spec.a_lo) * unit(rng);
    p.b = spec.b_lo + (spec.b_hi - spec.b_lo) * unit(rng);
  }
  const auto m = static_cast<Eigen::Index>(n);
  SocialGraph::Matrix w = SocialGraph::Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (unit(rng) < spec.density) w(i, j) = w(j, i) = unit(rng);
    }
  }
  double ratio = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    ratio = std::max(ratio, w.row(i).sum() / (2.0 * profiles[static_cast<std::size_t>(i)].b));
  }
  if (ratio > 0.0) w *= spec.max_ratio * unit(rng) / ratio;
  return MarketInstance(std::move(profiles), SocialGraph(w), spec.params);
}

// Random-network markets in which every user participates for modest
// rewards (a_i well above c).
inline crowdmarket::ScenarioConfig interior_scenario(std::uint64_t seed, std::size_t n) {
  crowdmarket::ScenarioConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.params = MarketParams{5.0, 1.0, 20.0, 0.05};
  return cfg;
}

inline MarketInstance interior_instance(std::uint64_t seed, std::size_t n) {
  return crowdmarket::generate_random_instance(interior_scenario(seed, n)).instance;
}

}  // namespace testing
