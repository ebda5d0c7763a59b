#pragma once

// Seeded market generators: random social networks with normally
// distributed coefficients, and the quadratic-weight chain graph.
//
// Reproducibility: every parameter family (a, b, g) draws from its own
// std::mt19937_64 stream, seeded with splitmix64(seed ^ family tag).
// Uniforms take the top 53 bits of each 64-bit output; normals use the
// cosine branch of Box-Muller (one normal per two uniforms). The engine's
// output sequence is fixed by the standard and the transform is ours, so
// equal seeds give identical instances everywhere up to libm rounding of
// log/cos/sqrt (bit-identical on a given toolchain).

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "crowdmarket/market.hpp"
#include "crowdmarket/reward.hpp"

namespace crowdmarket {

/// Target for max_i sum_j g_ij / (2 b_i) when Assumption 1 is enforced.
inline constexpr double kAssumption1Target = 0.99;
inline constexpr int kMaxResampleAttempts = 1000;

struct ScenarioConfig {
  std::size_t n = 100;
  // Second parameters are variances.
  double mu_a = 15.0;
  double sigma2_a = 2.5;
  double mu_b = 15.0;
  double sigma2_b = 2.5;
  double mu_g = 0.1;
  double sigma2_g = 1.0;
  MarketParams params{16.0, 0.01, 20.0, 0.05};
  std::uint64_t seed = 1;
  double b_floor = 0.5;
  bool enforce_assumption1 = true;

  void validate() const;
};

/// One family's draw stream.
class ParameterStream {
 public:
  enum class Family : std::uint64_t { kA = 1, kB = 2, kG = 3 };

  ParameterStream(std::uint64_t seed, Family family);

  /// Uniform on (0, 1].
  double uniform();
  double standard_normal();
  double normal(double mean, double variance) {
    return mean + std::sqrt(variance) * standard_normal();
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct GeneratedInstance {
  MarketInstance instance;
  /// Factor rho <= 1 applied to G (1 when nothing was rescaled).
  double tie_scale = 1.0;
  /// max_i sum_j g_ij / (2 b_i) before rescaling.
  double raw_max_ratio = 0.0;
};

/// a_i ~ N(mu_a, s2_a) clamped at 0; b_i ~ N(mu_b, s2_b) resampled until
/// >= b_floor; g_ij (i < j) ~ N(mu_g, s2_g) clamped at 0 and mirrored. With
/// enforce_assumption1 the ties are scaled by the largest rho <= 1 that
/// brings every row ratio to at most 0.99.
GeneratedInstance generate_random_instance(const ScenarioConfig& cfg);

/// b draws alone (the b stream of `seed`), for Monte Carlo over b.
Eigen::VectorXd sample_b(const ScenarioConfig& cfg, std::uint64_t seed);

/// Tie on edge (i, i + 1), 1-indexed i in [1, n - 1]:
/// 0.2 (0.5 - (0.5 - (i - 1)/n)^2).
double chain_tie_weight(std::size_t i, std::size_t n);
/// Path graph with chain_tie_weight ties and identical users (a, b).
MarketInstance generate_chain_instance(std::size_t n, const MarketParams& params, double a,
                                       double b);

/// E[max(0, X)], X ~ N(mean, variance).
double clamped_normal_mean(double mean, double variance);
/// E[X | X >= floor], X ~ N(mean, variance): the mean of a resampled draw.
double floored_normal_mean(double mean, double variance, double floor);
/// Post-clamping/resampling means of a and b, in closed form.
ExpectationProfile expectation_of(const ScenarioConfig& cfg);

}  // namespace crowdmarket
