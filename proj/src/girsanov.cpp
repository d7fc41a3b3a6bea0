#include "tchedge/girsanov.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tchedge/error.hpp"
#include "tchedge/regression.hpp"

namespace tchedge {

ScenarioShift ScenarioShift::constant(std::size_t steps, double theta_B,
                                      const std::vector<double>& theta_H, double bound,
                                      Filtration filtration) {
  ScenarioShift s;
  s.theta_B.assign(steps, theta_B);
  s.theta_H = CellTable<double>(steps, theta_H.size());
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t j = 0; j < theta_H.size(); ++j) s.theta_H(i, j) = theta_H[j];
  }
  s.bound = bound;
  s.filtration = filtration;
  return s;
}

ScenarioShift ScenarioShift::zero(std::size_t steps, std::size_t marks) {
  return constant(steps, 0.0, std::vector<double>(marks, 0.0));
}

namespace {

void check_shape(const ScenarioShift& theta, std::size_t steps, std::size_t marks) {
  if (theta.theta_B.size() != steps || theta.theta_H.cells() != steps ||
      theta.theta_H.marks() != marks) {
    throw std::invalid_argument("scenario shift does not match the path grid");
  }
}

}  // namespace

AdmissibilityReport check_scenario_admissible(const ScenarioShift& theta,
                                              const IntensityPath& intensity,
                                              const JumpMeasure& nu) {
  check_shape(theta, intensity.steps(), nu.size());
  AdmissibilityReport report;
  const double K = theta.bound;
  auto fail = [&](std::size_t i, std::optional<std::size_t> j, const std::string& what) {
    report.admissible = false;
    report.node = i;
    report.mark = j;
    report.message = what;
  };
  for (std::size_t i = 0; i < intensity.steps() && report.admissible; ++i) {
    const double tb = theta.theta_B[i] * intensity.lambda_B[i];
    if (!(std::abs(tb) < K)) {
      std::ostringstream msg;
      msg << "|theta_B lambda_B| = " << std::abs(tb) << " >= bound " << K << " at node " << i;
      fail(i, std::nullopt, msg.str());
      break;
    }
    const double root = std::sqrt(intensity.lambda_H[i]);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double th = theta.theta_H(i, j);
      std::ostringstream msg;
      if (!(th > -1.0)) {
        msg << "theta_H = " << th << " <= -1 at node " << i << ", mark " << j;
        fail(i, j, msg.str());
        break;
      }
      if (th < 0.0) {
        msg << "theta_H = " << th << " < 0 at node " << i << ", mark " << j;
        fail(i, j, msg.str());
        break;
      }
      if (!(th * root < K * std::abs(nu.mark(j)))) {
        msg << "theta_H sqrt(lambda_H) = " << th * root << " >= bound " << K << " |z| at node " << i
            << ", mark " << j;
        fail(i, j, msg.str());
        break;
      }
    }
  }
  return report;
}

void require_admissible(const ScenarioShift& theta, const IntensityPath& intensity,
                        const JumpMeasure& nu) {
  const auto report = check_scenario_admissible(theta, intensity, nu);
  if (!report.admissible) throw AdmissibilityError(report.message, report.node, report.mark);
}

DensityPath density_path(const ScenarioShift& theta, const NoisePath& noise,
                         const JumpMeasure& nu) {
  const std::size_t n = noise.steps();
  check_shape(theta, n, nu.size());
  const auto& lam = noise.intensity;
  const double dt = noise.dt;
  DensityPath d;
  d.log_z.assign(n + 1, 0.0);
  d.z.assign(n + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double tb = theta.theta_B[i];
    double step = tb * noise.dB[i] - 0.5 * tb * tb * lam.lambda_B[i] * dt;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double th = theta.theta_H(i, j);
      if (!(th > -1.0)) {
        throw AdmissibilityError("theta_H <= -1 at node " + std::to_string(i), i, j);
      }
      const double l = std::log1p(th);
      step += (l - th) * nu.weight(j) * lam.lambda_H[i] * dt + l * noise.compensated(i, j);
    }
    d.log_z[i + 1] = d.log_z[i] + step;
    d.z[i + 1] = std::exp(d.log_z[i + 1]);
  }
  return d;
}

ShiftedFields shifted_fields(const ScenarioShift& theta, const NoisePath& noise,
                             const JumpMeasure& nu) {
  const std::size_t n = noise.steps();
  check_shape(theta, n, nu.size());
  const auto& lam = noise.intensity;
  ShiftedFields f{noise.dB, noise.compensated};
  for (std::size_t i = 0; i < n; ++i) {
    f.dB[i] -= theta.theta_B[i] * lam.lambda_B[i] * noise.dt;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      f.compensated(i, j) -= theta.theta_H(i, j) * nu.weight(j) * lam.lambda_H[i] * noise.dt;
    }
  }
  return f;
}

WeightedMean reweighted_expectation(std::span<const double> z, std::span<const double> payoff) {
  if (z.size() != payoff.size()) throw std::invalid_argument("samples are not aligned");
  if (z.empty()) throw std::invalid_argument("empty sample");
  const double n = static_cast<double>(z.size());
  double sz = 0.0, szx = 0.0, sz2 = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    sz += z[k];
    szx += z[k] * payoff[k];
    sz2 += z[k] * z[k];
  }
  WeightedMean w;
  w.value = szx / sz;
  w.raw = szx / n;
  w.weight_mean = sz / n;
  w.weight_second_moment = sz2 / n;
  double dev = 0.0, raw_dev = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double a = z[k] * (payoff[k] - w.value);
    dev += a * a;
    const double b = z[k] * payoff[k] - w.raw;
    raw_dev += b * b;
  }
  w.standard_error = std::sqrt(dev) / sz;
  w.raw_standard_error = z.size() > 1 ? std::sqrt(raw_dev / (n - 1.0) / n) : 0.0;
  return w;
}

Eigen::VectorXd conditional_reweighted_expectation(std::span<const double> z,
                                                   std::span<const double> payoff,
                                                   const Eigen::MatrixXd& design) {
  if (z.size() != payoff.size() || static_cast<Eigen::Index>(z.size()) != design.rows()) {
    throw std::invalid_argument("samples are not aligned");
  }
  const auto n = design.rows();
  Eigen::MatrixXd targets(n, 2);
  for (Eigen::Index k = 0; k < n; ++k) {
    targets(k, 0) = z[static_cast<std::size_t>(k)] * payoff[static_cast<std::size_t>(k)];
    targets(k, 1) = z[static_cast<std::size_t>(k)];
  }
  const auto fit = least_squares(design, targets);
  const double fallback = reweighted_expectation(z, payoff).value;
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double den = fit.fitted(k, 1);
    out(k) = den > 1e-12 ? fit.fitted(k, 0) / den : fallback;
  }
  return out;
}

ShiftEnsemble ShiftEnsemble::uniform(ScenarioShift shift) {
  ShiftEnsemble s;
  s.shifts_.push_back(std::move(shift));
  return s;
}

ShiftEnsemble ShiftEnsemble::per_path(std::vector<ScenarioShift> shifts) {
  ShiftEnsemble s;
  s.shifts_ = std::move(shifts);
  return s;
}

ShiftEnsemble ShiftEnsemble::scaled(double factor_B, double factor_H) const {
  ShiftEnsemble out = *this;
  for (auto& s : out.shifts_) {
    for (double& v : s.theta_B) v *= factor_B;
    for (std::size_t i = 0; i < s.theta_H.cells(); ++i) {
      for (std::size_t j = 0; j < s.theta_H.marks(); ++j) s.theta_H(i, j) *= factor_H;
    }
  }
  return out;
}

Eigen::MatrixXd density_paths(const ShiftEnsemble& theta, const PathEnsemble& paths) {
  const std::size_t n = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  Eigen::MatrixXd z(paths.size(), static_cast<Eigen::Index>(n + 1));
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const ScenarioShift& s = theta[p];
    check_shape(s, n, J);
    const auto r = static_cast<Eigen::Index>(p);
    double lz = 0.0;
    z(r, 0) = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      const double tb = s.theta_B[i];
      double step = tb * paths.dB(r, c) - 0.5 * tb * tb * paths.lambda_B(r, c) * dt;
      for (std::size_t j = 0; j < J; ++j) {
        const double th = s.theta_H(i, j);
        if (!(th > -1.0)) {
          throw AdmissibilityError(
              "theta_H <= -1 on path " + std::to_string(p) + " at node " + std::to_string(i), i, j);
        }
        const double l = std::log1p(th);
        step += (l - th) * paths.jumps.weight(j) * paths.lambda_H(r, c) * dt +
                l * paths.compensated[j](r, c);
      }
      lz += step;
      z(r, c + 1) = std::exp(lz);
    }
  }
  return z;
}

AdmissibilitySummary check_scenario_admissible(const ShiftEnsemble& theta,
                                               const PathEnsemble& paths) {
  AdmissibilitySummary summary;
  const bool deterministic_clock = (paths.lambda_B.rowwise() - paths.lambda_B.row(0)).isZero(0.0) &&
                                   (paths.lambda_H.rowwise() - paths.lambda_H.row(0)).isZero(0.0);
  const std::size_t check = theta.is_uniform() && deterministic_clock ? 1 : paths.size();
  for (std::size_t p = 0; p < check && p < paths.size(); ++p) {
    const auto report = check_scenario_admissible(theta[p], paths.intensity_path(p), paths.jumps);
    if (!report.admissible) {
      if (summary.admissible) {
        summary.first = report;
        summary.first_path = p;
      }
      summary.admissible = false;
      ++summary.violations;
    }
  }
  return summary;
}

StructureReport structure_check_deterministic_theta(const ScenarioShift& theta,
                                                    const PathEnsemble& paths, double tolerance) {
  const std::size_t n = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (theta.theta_H(i, j) != theta.theta_H(0, j)) {
        throw std::invalid_argument("structure check needs theta_H constant in time");
      }
    }
  }
  const Eigen::MatrixXd z = density_paths(ShiftEnsemble::uniform(theta), paths);
  const Eigen::VectorXd zt = z.col(static_cast<Eigen::Index>(n));
  const std::span<const double> weights(zt.data(), static_cast<std::size_t>(zt.size()));

  StructureReport report;
  std::vector<double> counted(paths.size()), expected(paths.size()), gap(paths.size()),
      cell_gap(paths.size());
  for (std::size_t j = 0; j < J; ++j) {
    const double factor = (1.0 + theta.theta_H(0, j)) * paths.jumps.weight(j) * dt;
    MarkIntensityCheck check;
    check.mark = j;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const auto r = static_cast<Eigen::Index>(p);
      counted[p] = paths.counts[j].row(r).sum();
      expected[p] = factor * paths.lambda_H.row(r).head(static_cast<Eigen::Index>(n)).sum();
      gap[p] = counted[p] - expected[p];
    }
    check.estimate = reweighted_expectation(weights, counted).value;
    check.expected = reweighted_expectation(weights, expected).value;
    const auto g = reweighted_expectation(weights, gap);
    check.discrepancy = g.value;
    check.standard_error = g.standard_error;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto r = static_cast<Eigen::Index>(p);
        cell_gap[p] = paths.counts[j](r, c) - factor * paths.lambda_H(r, c);
      }
      const auto cg = reweighted_expectation(weights, cell_gap);
      if (cg.standard_error > 0.0) {
        check.max_cell_z = std::max(check.max_cell_z, std::abs(cg.value) / cg.standard_error);
      }
    }
    if (!(std::abs(check.discrepancy) <= tolerance * check.standard_error)) {
      report.consistent = false;
    }
    report.marks.push_back(check);
  }
  return report;
}

}  // namespace tchedge
