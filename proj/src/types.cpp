#include "qdef/types.hpp"

#include <Eigen/Eigenvalues>

namespace qdef {

namespace {

std::string dim_string(long rows, long cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

DensityOperator::DensityOperator(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() < 1 || mat_.rows() != mat_.cols()) {
    throw DimensionError("density operator must be square and nonempty, got " +
                         dim_string(mat_.rows(), mat_.cols()));
  }
  const double herm = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw InvariantError("density operator is not Hermitian: max |rho - rho^dag| = " +
                         std::to_string(herm));
  }
  const double trace_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (trace_err > kTraceTol) {
    throw InvariantError("density operator trace differs from 1 by " +
                         std::to_string(trace_err));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kPsdFloor) {
    throw InvariantError("density operator has eigenvalue " + std::to_string(min_eig) +
                         " below the PSD floor");
  }
  purity_ = (mat_ * mat_).trace().real();
  pure_ = (1.0 - purity_) <= kPurityTol;
}

PureState::PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
  if (amp_.size() < 1) {
    throw DimensionError("pure state must have at least one amplitude");
  }
  const double norm_err = std::abs(amp_.norm() - 1.0);
  if (norm_err > kNormTol) {
    throw InvariantError("pure state norm differs from 1 by " + std::to_string(norm_err));
  }
}

DensityOperator PureState::projector() const {
  return DensityOperator(amp_ * amp_.adjoint());
}

BipartiteState::BipartiteState(DensityOperator rho, int dim_a, int dim_b)
    : rho_(std::move(rho)), dim_a_(dim_a), dim_b_(dim_b) {
  if (dim_a_ < 1 || dim_b_ < 1) {
    throw DimensionError("bipartite factors must be positive, got " +
                         dim_string(dim_a_, dim_b_));
  }
  if (rho_.dim() != dim_a_ * dim_b_) {
    throw DimensionError("state dimension " + std::to_string(rho_.dim()) +
                         " does not factor as " + dim_string(dim_a_, dim_b_));
  }
}

}  // namespace qdef
