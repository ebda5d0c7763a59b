#include "crowdmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "crowdmarket/error.hpp"

namespace crowdmarket {
namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " = " << value;
  return os.str();
}

void check_length(const char* name, std::size_t got, std::size_t expected) {
  if (got != expected) {
    std::ostringstream os;
    os << name << " has length " << got << " but the instance has " << expected
       << " users";
    throw InvariantError(os.str());
  }
}

}  // namespace

void MuProfile::validate() const {
  if (!std::isfinite(a) || a < 0.0) throw InvariantError(describe("profile a must be >= 0, got a", a));
  if (!std::isfinite(b) || b <= 0.0) throw InvariantError(describe("profile b must be > 0, got b", b));
}

void MarketParams::validate() const {
  if (!std::isfinite(c) || c < 0.0) throw InvariantError(describe("params.c must be >= 0, got c", c));
  if (!std::isfinite(mu) || mu <= 0.0) throw InvariantError(describe("params.mu must be > 0, got mu", mu));
  if (!std::isfinite(s) || s <= 0.0) throw InvariantError(describe("params.s must be > 0, got s", s));
  if (!std::isfinite(t) || t < 0.0) throw InvariantError(describe("params.t must be >= 0, got t", t));
}

SocialGraph::SocialGraph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    std::ostringstream os;
    os << "graph must be square, got " << weights_.rows() << "x" << weights_.cols();
    throw InvariantError(os.str());
  }
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double g = weights_(i, j);
      std::ostringstream os;
      os.precision(17);
      if (!std::isfinite(g)) {
        os << "graph[" << i << "][" << j << "] is not finite";
        throw InvariantError(os.str());
      }
      if (i == j && g != 0.0) {
        os << "graph[" << i << "][" << i << "] = " << g << " but the diagonal must be zero";
        throw InvariantError(os.str());
      }
      if (g < 0.0) {
        os << "graph[" << i << "][" << j << "] = " << g << " is negative";
        throw InvariantError(os.str());
      }
      if (j > i && std::abs(g - weights_(j, i)) > kSymmetryTolerance) {
        os << "graph[" << i << "][" << j << "] = " << g << " differs from graph[" << j
           << "][" << i << "] = " << weights_(j, i) << " (ties must be reciprocal)";
        throw InvariantError(os.str());
      }
    }
  }
}

SocialGraph SocialGraph::empty(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return SocialGraph(Matrix::Zero(m, m));
}

SocialGraph::Matrix SocialGraph::symmetrize(const Matrix& weights) {
  Matrix out = 0.5 * (weights + weights.transpose());
  return out;
}

double SocialGraph::row_sum(std::size_t i) const {
  return weights_.row(static_cast<Eigen::Index>(i)).sum();
}

std::size_t SocialGraph::nonzeros() const {
  return static_cast<std::size_t>((weights_.array() > 0.0).count());
}

bool RewardVector::is_uniform() const {
  if (values_.size() == 0) return true;
  return (values_.array() == values_(0)).all();
}

ParticipationProfile ParticipationProfile::checked(Eigen::VectorXd values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values(i)) || values(i) < 0.0) {
      std::ostringstream os;
      os << "participation x[" << i << "] = " << values(i) << " must be finite and >= 0";
      throw InvariantError(os.str());
    }
  }
  return ParticipationProfile(std::move(values));
}

bool ParticipationProfile::feasible() const {
  return values_.allFinite() && (values_.array() >= 0.0).all();
}

MarketInstance::MarketInstance(std::vector<MuProfile> profiles, SocialGraph graph,
                               MarketParams params)
    : profiles_(std::move(profiles)), graph_(std::move(graph)), params_(params) {
  if (profiles_.empty()) throw InvariantError("instance must contain at least one user");
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    try {
      profiles_[i].validate();
    } catch (const InvariantError& e) {
      throw InvariantError("profiles[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (graph_.size() != profiles_.size()) {
    std::ostringstream os;
    os << "graph is " << graph_.size() << "x" << graph_.size() << " but there are "
       << profiles_.size() << " profiles";
    throw InvariantError(os.str());
  }
  params_.validate();

  const auto n = static_cast<Eigen::Index>(profiles_.size());
  a_.resize(n);
  b_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a_(i) = profiles_[static_cast<std::size_t>(i)].a;
    b_(i) = profiles_[static_cast<std::size_t>(i)].b;
  }
  two_b_ = 2.0 * b_;
}

Eigen::MatrixXd MarketInstance::interaction_matrix() const {
  Eigen::MatrixXd m = -graph_.weights();
  m.diagonal() += two_b_;
  return m;
}

MarketInstance MarketInstance::with_graph(SocialGraph graph) const {
  return MarketInstance(profiles_, std::move(graph), params_);
}

MarketInstance MarketInstance::with_params(MarketParams params) const {
  return MarketInstance(profiles_, graph_, params);
}

double mu_utility(const MarketInstance& inst, std::size_t i, const Eigen::VectorXd& x,
                  const RewardVector& r) {
  const std::size_t n = inst.size();
  if (i >= n) {
    throw InvariantError("user index " + std::to_string(i) + " out of range for " +
                         std::to_string(n) + " users");
  }
  check_length("participation", static_cast<std::size_t>(x.size()), n);
  check_length("reward", r.size(), n);
  const auto k = static_cast<Eigen::Index>(i);
  const double xi = x(k);
  const double social = inst.graph().weights().row(k).dot(x);
  return inst.a()(k) * xi - inst.b()(k) * xi * xi + social * xi + r[i] * xi -
         inst.params().c * xi;
}

Eigen::VectorXd mu_utilities(const MarketInstance& inst, const Eigen::VectorXd& x,
                             const RewardVector& r) {
  Eigen::VectorXd u(static_cast<Eigen::Index>(inst.size()));
  for (std::size_t i = 0; i < inst.size(); ++i) {
    u(static_cast<Eigen::Index>(i)) = mu_utility(inst, i, x, r);
  }
  return u;
}

double total_mu_utility(const MarketInstance& inst, const Eigen::VectorXd& x,
                        const RewardVector& r) {
  return mu_utilities(inst, x, r).sum();
}

double gross_contribution(const MarketInstance& inst, const Eigen::VectorXd& x) {
  check_length("participation", static_cast<std::size_t>(x.size()), inst.size());
  const MarketParams& p = inst.params();
  return p.mu * (p.s * x.array() - p.t * x.array().square()).sum();
}

double total_reward_paid(const RewardVector& r, const Eigen::VectorXd& x) {
  check_length("reward", r.size(), static_cast<std::size_t>(x.size()));
  return r.values().dot(x);
}

double csp_revenue(const MarketInstance& inst, const Eigen::VectorXd& x,
                   const RewardVector& r) {
  check_length("reward", r.size(), inst.size());
  return gross_contribution(inst, x) - total_reward_paid(r, x);
}

double Assumption1Report::min_margin() const {
  return margins.empty() ? 1.0 : *std::min_element(margins.begin(), margins.end());
}

Assumption1Report check_assumption1(const MarketInstance& inst) {
  Assumption1Report report;
  report.margins.resize(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double ratio =
        inst.graph().row_sum(i) / inst.two_b()(static_cast<Eigen::Index>(i));
    report.margins[i] = 1.0 - ratio;
    if (!(ratio < 1.0)) report.holds = false;
  }
  return report;
}

Assumption2Report check_assumption2(const MarketInstance& inst) {
  const MarketParams& p = inst.params();
  Assumption2Report report;
  report.cost = p.c;
  report.threshold = inst.mean_a() + p.mu * p.s;
  report.holds = p.c >= report.threshold;
  return report;
}

PositiveDefiniteReport check_positive_definite(const MarketInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inst.interaction_matrix(),
                                                        Eigen::EigenvaluesOnly);
  PositiveDefiniteReport report;
  if (solver.info() != Eigen::Success) {
    report.positive_definite = false;
    report.min_eigenvalue = std::nan("");
    return report;
  }
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.positive_definite = report.min_eigenvalue > kPositiveDefiniteTolerance;
  return report;
}

Eigen::VectorXd diagonal_dominance_margins(const MarketInstance& inst) {
  const Eigen::MatrixXd m = inst.interaction_matrix();
  Eigen::VectorXd margins(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    margins(i) = m(i, i) - off;
  }
  return margins;
}

}  // namespace crowdmarket
