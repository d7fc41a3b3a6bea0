#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

#include "tchedge/ensemble.hpp"
#include "tchedge/girsanov.hpp"

namespace tchedge {

enum class FeatureGroup { stock, intensity, brownian, eta };

// Regression features at a node. The design always starts with an intercept;
// the remaining raw columns are standardized and columns without variation
// across paths are dropped.
class Basis {
 public:
  // Raw (pre-standardization) columns for all paths at a node.
  using FeatureMap = std::function<Eigen::MatrixXd(const PathEnsemble&, std::size_t node)>;

  // Polynomial features of the state at the node. The G version appends
  // terminal intensity functionals, so its span contains the F span.
  static Basis polynomial(Filtration filtration, std::vector<FeatureGroup> groups = {
                                                     FeatureGroup::stock, FeatureGroup::intensity});
  static Basis custom(Filtration filtration, FeatureMap map);

  Filtration filtration() const { return filtration_; }
  const std::vector<FeatureGroup>& groups() const { return groups_; }

  Eigen::MatrixXd raw(const PathEnsemble& paths, std::size_t node) const;
  Eigen::MatrixXd design(const PathEnsemble& paths, std::size_t node) const;

 private:
  Filtration filtration_ = Filtration::F;
  std::vector<FeatureGroup> groups_;
  FeatureMap custom_;
};

// Intercept plus standardized, non-constant columns of `raw`.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& raw);

// Design on intensity functionals alone (G_0 information).
Eigen::MatrixXd intensity_design(const PathEnsemble& paths);

}  // namespace tchedge
