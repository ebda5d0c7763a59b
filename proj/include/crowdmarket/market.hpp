#pragma once

// Market domain types for the reward-participation game: mobile users with
// linear-quadratic private utility, a reciprocal social graph, and the
// sensing provider's revenue. All values are double precision and every
// type validates its invariants on construction.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace crowdmarket {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPositiveDefiniteTolerance = 1e-10;

/// Intrinsic value of participation to one user: a*x - b*x^2.
struct MuProfile {
  double a = 0.0;
  double b = 1.0;

  /// Throws InvariantError unless a >= 0 and b > 0 (both finite).
  void validate() const;
};

/// Unit participation cost, monetary conversion and revenue shape.
struct MarketParams {
  double c = 0.0;
  double mu = 1.0;
  double s = 1.0;
  double t = 1.0;

  /// c >= 0, mu > 0, s > 0, t >= 0.
  void validate() const;
};

/// Symmetric, nonnegative, zero-diagonal tie matrix. Entry (i, j) is the
/// influence of user j on user i. Stored row-major so best-response sweeps
/// read contiguous rows.
class SocialGraph {
 public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  SocialGraph() = default;
  /// Validates shape, finiteness, symmetry (|g_ij - g_ji| <= 1e-12),
  /// zero diagonal and nonnegativity. Reports the first offending entry.
  explicit SocialGraph(Matrix weights);

  static SocialGraph empty(std::size_t n);
  /// (W + W^T) / 2. Does not touch the diagonal or signs.
  static Matrix symmetrize(const Matrix& weights);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double operator()(std::size_t i, std::size_t j) const {
    return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double row_sum(std::size_t i) const;
  /// Number of strictly positive entries.
  std::size_t nonzeros() const;

 private:
  Matrix weights_;
};

/// Per-effort-unit rewards r_i. Any real values, negative included.
class RewardVector {
 public:
  RewardVector() = default;
  explicit RewardVector(Eigen::VectorXd values) : values_(std::move(values)) {}
  static RewardVector uniform(std::size_t n, double r) {
    return RewardVector(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), r));
  }

  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const {
    return values_(static_cast<Eigen::Index>(i));
  }
  double mean() const { return values_.size() == 0 ? 0.0 : values_.mean(); }
  bool is_uniform() const;

 private:
  Eigen::VectorXd values_;
};

/// Effort levels x_i. Profiles produced by the closed-form solver may carry
/// negative entries when the interior assumption fails; `feasible()` tells
/// them apart from genuine strategy profiles.
class ParticipationProfile {
 public:
  ParticipationProfile() = default;
  explicit ParticipationProfile(Eigen::VectorXd values)
      : values_(std::move(values)) {}

  /// Throws InvariantError on any negative or non-finite entry.
  static ParticipationProfile checked(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const {
    return values_(static_cast<Eigen::Index>(i));
  }
  bool feasible() const;

 private:
  Eigen::VectorXd values_;
};

/// Immutable market: user profiles, social graph, parameters.
class MarketInstance {
 public:
  MarketInstance(std::vector<MuProfile> profiles, SocialGraph graph,
                 MarketParams params);

  std::size_t size() const { return profiles_.size(); }
  const std::vector<MuProfile>& profiles() const { return profiles_; }
  const SocialGraph& graph() const { return graph_; }
  const MarketParams& params() const { return params_; }

  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  /// Diagonal of B = diag(2 b_i).
  const Eigen::VectorXd& two_b() const { return two_b_; }
  double mean_a() const { return a_.mean(); }

  /// B - G as a dense column-major matrix.
  Eigen::MatrixXd interaction_matrix() const;

  /// Same instance with a different tie matrix or market parameters.
  MarketInstance with_graph(SocialGraph graph) const;
  MarketInstance with_params(MarketParams params) const;

 private:
  std::vector<MuProfile> profiles_;
  SocialGraph graph_;
  MarketParams params_;
  Eigen::VectorXd a_;
  Eigen::VectorXd b_;
  Eigen::VectorXd two_b_;
};

// Utility and revenue. `x` may be any real effort vector of length N, so
// the linear-model (closed-form) profiles can be scored as well.

/// a_i x_i - b_i x_i^2 + sum_j g_ij x_i x_j + r_i x_i - c x_i.
double mu_utility(const MarketInstance& inst, std::size_t i,
                  const Eigen::VectorXd& x, const RewardVector& r);
Eigen::VectorXd mu_utilities(const MarketInstance& inst,
                             const Eigen::VectorXd& x, const RewardVector& r);
double total_mu_utility(const MarketInstance& inst, const Eigen::VectorXd& x,
                        const RewardVector& r);

/// mu * sum_i (s x_i - t x_i^2): monetary worth of the aggregate effort.
double gross_contribution(const MarketInstance& inst, const Eigen::VectorXd& x);
/// sum_i r_i x_i.
double total_reward_paid(const RewardVector& r, const Eigen::VectorXd& x);
/// gross_contribution - total_reward_paid.
double csp_revenue(const MarketInstance& inst, const Eigen::VectorXd& x,
                   const RewardVector& r);

// Validity checks.

struct Assumption1Report {
  bool holds = true;
  /// 1 - sum_j g_ij / (2 b_i) per user.
  std::vector<double> margins;
  double min_margin() const;
  /// max_i sum_j g_ij / (2 b_i).
  double max_ratio() const { return 1.0 - min_margin(); }
};

struct Assumption2Report {
  bool holds = true;
  double cost = 0.0;       // c
  double threshold = 0.0;  // mean(a) + mu * s
};

struct PositiveDefiniteReport {
  bool positive_definite = true;
  double min_eigenvalue = 0.0;
};

Assumption1Report check_assumption1(const MarketInstance& inst);
Assumption2Report check_assumption2(const MarketInstance& inst);
/// Smallest eigenvalue of B - G from a symmetric eigensolver; positive
/// definite iff it exceeds kPositiveDefiniteTolerance.
PositiveDefiniteReport check_positive_definite(const MarketInstance& inst);

/// Per-row 2 b_i - sum_{j != i} |(B - G)_ij|. All positive iff B - G is
/// strictly diagonally dominant.
Eigen::VectorXd diagonal_dominance_margins(const MarketInstance& inst);

}  // namespace crowdmarket
