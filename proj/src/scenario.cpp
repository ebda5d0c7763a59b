#include "crowdmarket/scenario.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "crowdmarket/error.hpp"

namespace crowdmarket {
namespace {

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double draw_floored(ParameterStream& stream, double mean, double variance, double floor,
                    std::size_t index) {
  for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
    const double v = stream.normal(mean, variance);
    if (v >= floor) return v;
  }
  std::ostringstream os;
  os << "b[" << index << "]: no draw >= b_floor = " << floor << " in "
     << kMaxResampleAttempts << " attempts";
  throw InvariantError(os.str());
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n < 1) throw InvariantError("scenario n must be >= 1");
  const double vars[] = {sigma2_a, sigma2_b, sigma2_g};
  for (double v : vars) {
    if (!std::isfinite(v) || v < 0.0) throw InvariantError("scenario variances must be >= 0");
  }
  if (!std::isfinite(mu_a) || !std::isfinite(mu_b) || !std::isfinite(mu_g)) {
    throw InvariantError("scenario means must be finite");
  }
  if (!std::isfinite(b_floor) || b_floor <= 0.0) {
    throw InvariantError("scenario b_floor must be > 0");
  }
  params.validate();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

ParameterStream::ParameterStream(std::uint64_t seed, Family family)
    : engine_(splitmix64(seed ^ (static_cast<std::uint64_t>(family) << 56))) {}

double ParameterStream::uniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(engine_() >> 11) + 1.0) * kScale;
}

double ParameterStream::standard_normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

GeneratedInstance generate_random_instance(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n;

  ParameterStream a_stream(cfg.seed, ParameterStream::Family::kA);
  std::vector<MuProfile> profiles(n);
  for (auto& p : profiles) p.a = std::max(0.0, a_stream.normal(cfg.mu_a, cfg.sigma2_a));

  const Eigen::VectorXd b = sample_b(cfg, cfg.seed);
  for (std::size_t i = 0; i < n; ++i) profiles[i].b = b(static_cast<Eigen::Index>(i));

  ParameterStream g_stream(cfg.seed, ParameterStream::Family::kG);
  const auto m = static_cast<Eigen::Index>(n);
  SocialGraph::Matrix g = SocialGraph::Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double w = std::max(0.0, g_stream.normal(cfg.mu_g, cfg.sigma2_g));
      g(i, j) = w;
      g(j, i) = w;
    }
  }

  double raw_ratio = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    raw_ratio = std::max(raw_ratio, g.row(i).sum() / (2.0 * b(i)));
  }
  double rho = 1.0;
  if (cfg.enforce_assumption1 && raw_ratio > kAssumption1Target) {
    rho = kAssumption1Target / raw_ratio;
    g *= rho;
    double scaled = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) scaled = std::max(scaled, g.row(i).sum() / (2.0 * b(i)));
    if (scaled > kAssumption1Target) {
      const double fix = kAssumption1Target / scaled;
      g *= fix;
      rho *= fix;
    }
  }

  return GeneratedInstance{
      MarketInstance(std::move(profiles), SocialGraph(std::move(g)), cfg.params), rho,
      raw_ratio};
}

Eigen::VectorXd sample_b(const ScenarioConfig& cfg, std::uint64_t seed) {
  ParameterStream stream(seed, ParameterStream::Family::kB);
  Eigen::VectorXd b(static_cast<Eigen::Index>(cfg.n));
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    b(i) = draw_floored(stream, cfg.mu_b, cfg.sigma2_b, cfg.b_floor,
                        static_cast<std::size_t>(i));
  }
  return b;
}

double chain_tie_weight(std::size_t i, std::size_t n) {
  const double pos = static_cast<double>(i - 1) / static_cast<double>(n);
  const double d = 0.5 - pos;
  return 0.2 * (0.5 - d * d);
}

MarketInstance generate_chain_instance(std::size_t n, const MarketParams& params, double a,
                                       double b) {
  if (n < 2) throw InvariantError("chain instance needs n >= 2, got " + std::to_string(n));
  const auto m = static_cast<Eigen::Index>(n);
  SocialGraph::Matrix g = SocialGraph::Matrix::Zero(m, m);
  for (std::size_t i = 1; i <= n - 1; ++i) {
    const double w = chain_tie_weight(i, n);
    const auto k = static_cast<Eigen::Index>(i - 1);
    g(k, k + 1) = w;
    g(k + 1, k) = w;
  }
  return MarketInstance(std::vector<MuProfile>(n, MuProfile{a, b}), SocialGraph(std::move(g)),
                        params);
}

double clamped_normal_mean(double mean, double variance) {
  if (variance <= 0.0) return std::max(0.0, mean);
  const double sd = std::sqrt(variance);
  const double z = mean / sd;
  return mean * std_normal_cdf(z) + sd * std_normal_pdf(z);
}

double floored_normal_mean(double mean, double variance, double floor) {
  if (variance <= 0.0) {
    if (mean < floor) throw InvariantError("degenerate b distribution lies below b_floor");
    return mean;
  }
  const double sd = std::sqrt(variance);
  const double alpha = (floor - mean) / sd;
  const double tail = 0.5 * std::erfc(alpha / std::numbers::sqrt2);  // 1 - Phi(alpha)
  if (!(tail > 0.0)) throw InvariantError("b_floor is unreachable for the b distribution");
  return mean + sd * std_normal_pdf(alpha) / tail;
}

ExpectationProfile expectation_of(const ScenarioConfig& cfg) {
  cfg.validate();
  return ExpectationProfile{clamped_normal_mean(cfg.mu_a, cfg.sigma2_a),
                            floored_normal_mean(cfg.mu_b, cfg.sigma2_b, cfg.b_floor)};
}

}  // namespace crowdmarket
