#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>

namespace tchedge {

struct LeastSquaresFit {
  Eigen::MatrixXd coefficients;  // columns x targets
  Eigen::MatrixXd fitted;        // rows x targets
  Eigen::VectorXd residual_rms;  // per target, weight-normalized
  double condition = 1.0;        // of the column-equilibrated Gram matrix
  std::size_t dropped = 0;       // eigen-directions left out by pruning
};

struct RegressionOptions {
  double max_condition = 1e14;
  std::size_t node = 0;  // reported in errors
  // When positive, eigen-directions of the equilibrated Gram matrix below
  // this fraction of the largest eigenvalue are dropped (minimum-norm fit).
  double prune_tolerance = 0.0;
};

// Weighted least squares through the normal equations. The Gram matrix is
// assembled in a fixed order and solved by a symmetric eigendecomposition,
// so results do not depend on thread scheduling. Throws RegressionError when
// the Gram matrix is singular to working precision.
LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets,
                              const Eigen::VectorXd* weights = nullptr,
                              const RegressionOptions& options = {});

}  // namespace tchedge
