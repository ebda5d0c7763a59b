#include "crowdmarket/influence.hpp"

#include <sstream>

#include "crowdmarket/error.hpp"

namespace crowdmarket {

DenseSolver::DenseSolver(Eigen::MatrixXd matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw SolverError(label_ + " is not a non-empty square matrix");
  }
  if (!matrix_.allFinite()) throw SolverError(label_ + " has non-finite entries");
  llt_.compute(matrix_);
  spd_ = llt_.info() == Eigen::Success &&
         llt_.matrixLLT().diagonal().minCoeff() > 0.0;
  if (spd_) return;

  lu_.compute(matrix_);
  if (!lu_.isInvertible()) {
    std::ostringstream os;
    os << "Cholesky and full-pivot LU factorization of " << label_
       << " failed: matrix is singular (rank " << lu_.rank() << " of " << matrix_.rows()
       << ")";
    throw SolverError(os.str());
  }
}

Eigen::VectorXd DenseSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != matrix_.rows()) {
    std::ostringstream os;
    os << "right-hand side of length " << rhs.size() << " does not match " << label_
       << " of size " << matrix_.rows();
    throw InvariantError(os.str());
  }
  if (spd_) return llt_.solve(rhs);
  return lu_.solve(rhs);
}

InfluenceOperator::InfluenceOperator(const MarketInstance& inst)
    : solver_(inst.interaction_matrix(), "B - G") {}

}  // namespace crowdmarket
