#include "tchedge/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tchedge {
namespace {

bool has(const std::vector<FeatureGroup>& groups, FeatureGroup g) {
  return std::find(groups.begin(), groups.end(), g) != groups.end();
}

Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& columns, Eigen::Index rows) {
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = columns[c];
  return out;
}

void powers(std::vector<Eigen::VectorXd>& out, const Eigen::VectorXd& x, int degree) {
  Eigen::VectorXd p = x;
  for (int d = 1; d <= degree; ++d) {
    out.push_back(p);
    p = p.cwiseProduct(x);
  }
}

// max(x - k, 0) at interior sample quantiles of x.
void hinges(std::vector<Eigen::VectorXd>& out, const Eigen::VectorXd& x) {
  if (x.size() < 2) return;
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double k = sorted[static_cast<std::size_t>(q * double(sorted.size() - 1))];
    out.push_back((x.array() - k).max(0.0).matrix());
  }
}

bool varies(const Eigen::VectorXd& x) { return x.size() > 0 && (x.array() != x(0)).any(); }

}  // namespace

Basis Basis::polynomial(Filtration filtration, std::vector<FeatureGroup> groups) {
  Basis b;
  b.filtration_ = filtration;
  b.groups_ = std::move(groups);
  return b;
}

Basis Basis::custom(Filtration filtration, FeatureMap map) {
  Basis b;
  b.filtration_ = filtration;
  b.custom_ = std::move(map);
  return b;
}

Eigen::MatrixXd Basis::raw(const PathEnsemble& paths, std::size_t node) const {
  if (node > paths.steps()) throw std::out_of_range("basis node outside the grid");
  if (custom_) return custom_(paths, node);

  const auto i = static_cast<Eigen::Index>(node);
  const auto N = static_cast<Eigen::Index>(paths.steps());
  const auto rows = static_cast<Eigen::Index>(paths.size());
  std::vector<Eigen::VectorXd> cols;

  Eigen::VectorXd s;
  if (has(groups_, FeatureGroup::stock)) {
    s = paths.s1.col(i).cwiseQuotient(paths.s1.col(0));
    powers(cols, s, 3);
    hinges(cols, s);
  }
  if (has(groups_, FeatureGroup::intensity)) {
    const Eigen::VectorXd lb = paths.lambda_B.col(i);
    powers(cols, lb, 2);
    powers(cols, paths.lambda_H.col(i), 2);
    powers(cols, paths.cum_B.col(i), 2);
    powers(cols, paths.cum_H.col(i), 2);
    if (s.size() > 0 && varies(lb)) cols.push_back(s.cwiseProduct(lb));
  }
  if (has(groups_, FeatureGroup::brownian)) powers(cols, paths.brownian.col(i), 2);
  if (has(groups_, FeatureGroup::eta)) powers(cols, paths.eta.col(i), 2);
  if (filtration_ == Filtration::G) {
    powers(cols, paths.cum_B.col(N), 3);
    powers(cols, paths.cum_H.col(N), 3);
  }
  return stack(cols, rows);
}

Eigen::MatrixXd Basis::design(const PathEnsemble& paths, std::size_t node) const {
  return standardize_columns(raw(paths, node));
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& raw) {
  const auto rows = raw.rows();
  const double n = static_cast<double>(rows);
  std::vector<Eigen::VectorXd> kept;
  kept.emplace_back(Eigen::VectorXd::Ones(rows));
  // Orthonormal span of the kept columns; the intercept is the first vector.
  std::vector<Eigen::VectorXd> span;
  span.emplace_back(Eigen::VectorXd::Constant(rows, 1.0 / std::sqrt(n)));
  for (Eigen::Index c = 0; c < raw.cols(); ++c) {
    const double mean = raw.col(c).sum() / n;
    Eigen::VectorXd centred = raw.col(c).array() - mean;
    const double sd = std::sqrt(centred.squaredNorm() / n);
    if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) continue;
    centred /= sd;
    // Drop columns that are linear combinations of earlier ones.
    Eigen::VectorXd r = centred;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : span) r -= q.dot(r) * q;
    }
    const double norm = r.norm();
    if (!(norm > 1e-7 * std::sqrt(n))) continue;
    span.push_back(r / norm);
    kept.push_back(std::move(centred));
  }
  return stack(kept, rows);
}

Eigen::MatrixXd intensity_design(const PathEnsemble& paths) {
  const auto N = static_cast<Eigen::Index>(paths.steps());
  std::vector<Eigen::VectorXd> cols;
  powers(cols, paths.cum_B.col(N), 3);
  powers(cols, paths.cum_H.col(N), 3);
  return standardize_columns(stack(cols, static_cast<Eigen::Index>(paths.size())));
}

}  // namespace tchedge
