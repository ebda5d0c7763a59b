#pragma once

#include <string>

#include <Eigen/Dense>

#include "crowdmarket/market.hpp"

namespace crowdmarket {

/// Factorized dense system used in place of an explicit inverse: Cholesky
/// when the matrix is symmetric positive definite, full-pivot LU otherwise.
class DenseSolver {
 public:
  /// `label` names the matrix in error messages. Throws SolverError when
  /// both factorizations fail.
  DenseSolver(Eigen::MatrixXd matrix, std::string label);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  bool used_cholesky() const { return spd_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::Index size() const { return matrix_.rows(); }

 private:
  Eigen::MatrixXd matrix_;
  std::string label_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
  bool spd_ = false;
};

/// Applications of K = (B - G)^{-1} for one instance.
class InfluenceOperator {
 public:
  explicit InfluenceOperator(const MarketInstance& inst);

  /// K v.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return solver_.solve(v); }
  /// K^2 v as two successive solves.
  Eigen::VectorXd apply_squared(const Eigen::VectorXd& v) const {
    return solver_.solve(solver_.solve(v));
  }
  /// B - G.
  const Eigen::MatrixXd& matrix() const { return solver_.matrix(); }
  bool used_cholesky() const { return solver_.used_cholesky(); }

 private:
  DenseSolver solver_;
};

}  // namespace crowdmarket
