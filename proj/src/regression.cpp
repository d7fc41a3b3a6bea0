#include "tchedge/regression.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tchedge/error.hpp"

namespace tchedge {

LeastSquaresFit least_squares(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets,
                              const Eigen::VectorXd* weights, const RegressionOptions& options) {
  const auto n = design.rows();
  const auto k = design.cols();
  if (targets.rows() != n || (weights && weights->size() != n)) {
    throw std::invalid_argument("regression inputs are not aligned");
  }
  if (k == 0 || n < k) {
    throw RegressionError(
        "regression at node " + std::to_string(options.node) + " has fewer samples than columns",
        options.node);
  }

  Eigen::MatrixXd weighted = design;
  if (weights) weighted.array().colwise() *= weights->array();
  const Eigen::MatrixXd gram = weighted.transpose() * design;
  const Eigen::MatrixXd rhs = weighted.transpose() * targets;

  Eigen::VectorXd scale = gram.diagonal().cwiseSqrt();
  for (Eigen::Index c = 0; c < k; ++c) {
    if (!(scale(c) > 0.0) || !std::isfinite(scale(c))) {
      throw RegressionError("regression at node " + std::to_string(options.node) +
                                " has a null or non-finite column " + std::to_string(c),
                            options.node);
    }
  }
  const Eigen::VectorXd inv = scale.cwiseInverse();
  const Eigen::MatrixXd scaled = inv.asDiagonal() * gram * inv.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  if (eig.info() != Eigen::Success) {
    throw RegressionError("eigendecomposition failed at node " + std::to_string(options.node),
                          options.node);
  }
  Eigen::VectorXd values = eig.eigenvalues();
  const double hi = values.maxCoeff();
  // With pruning, directions below the relative cutoff are left out, which
  // gives the minimum-norm solution on the retained spectrum.
  Eigen::Index dropped = 0;
  Eigen::VectorXd inverse(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (options.prune_tolerance > 0.0 && !(values(c) > options.prune_tolerance * hi)) {
      inverse(c) = 0.0;
      ++dropped;
    } else {
      inverse(c) = 1.0 / values(c);
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < k; ++c) {
    if (inverse(c) != 0.0) lo = std::min(lo, values(c));
  }
  const double condition =
      lo > 0.0 && std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    std::ostringstream msg;
    msg << "singular regression at node " << options.node << " (condition " << condition << ")";
    throw RegressionError(msg.str(), options.node);
  }

  const Eigen::MatrixXd& vectors = eig.eigenvectors();
  auto solve = [&](const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd scaled_b = inv.asDiagonal() * b;
    return Eigen::MatrixXd(inv.asDiagonal() *
                           (vectors * (inverse.asDiagonal() * (vectors.transpose() * scaled_b))));
  };

  LeastSquaresFit fit;
  fit.coefficients = solve(rhs);
  fit.fitted = design * fit.coefficients;
  // One step of iterative refinement on the residual recovers the accuracy
  // lost by forming the normal equations.
  {
    const Eigen::MatrixXd correction_rhs = weighted.transpose() * (targets - fit.fitted);
    fit.coefficients += solve(correction_rhs);
    fit.fitted = design * fit.coefficients;
  }
  fit.condition = condition;
  fit.dropped = static_cast<std::size_t>(dropped);

  const Eigen::MatrixXd residual = targets - fit.fitted;
  fit.residual_rms.resize(targets.cols());
  const double total_weight = weights ? weights->sum() : static_cast<double>(n);
  for (Eigen::Index t = 0; t < targets.cols(); ++t) {
    const double ss = weights ? (residual.col(t).array().square() * weights->array()).sum()
                              : residual.col(t).squaredNorm();
    fit.residual_rms(t) = std::sqrt(ss / total_weight);
  }
  return fit;
}

}  // namespace tchedge
