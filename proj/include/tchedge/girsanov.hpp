#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "tchedge/cell_table.hpp"
#include "tchedge/ensemble.hpp"
#include "tchedge/market.hpp"
#include "tchedge/noise.hpp"

namespace tchedge {

enum class Filtration { F, G };

// theta = (theta_B, theta_H) on one path, one value per cell.
struct ScenarioShift {
  std::vector<double> theta_B;
  CellTable<double> theta_H;
  double bound = 1e6;
  Filtration filtration = Filtration::F;

  static ScenarioShift constant(std::size_t steps, double theta_B,
                                const std::vector<double>& theta_H, double bound = 1e6,
                                Filtration filtration = Filtration::F);
  static ScenarioShift zero(std::size_t steps, std::size_t marks);
};

// theta_H > -1, |theta_B lambda_B| < K and 0 <= theta_H sqrt(lambda_H) < K |z|.
AdmissibilityReport check_scenario_admissible(const ScenarioShift& theta,
                                              const IntensityPath& intensity,
                                              const JumpMeasure& nu);
void require_admissible(const ScenarioShift& theta, const IntensityPath& intensity,
                        const JumpMeasure& nu);

struct DensityPath {
  std::vector<double> z;  // per node, z[0] = 1
  std::vector<double> log_z;
};

DensityPath density_path(const ScenarioShift& theta, const NoisePath& noise, const JumpMeasure& nu);

struct ShiftedFields {
  std::vector<double> dB;
  CellTable<double> compensated;
};

ShiftedFields shifted_fields(const ScenarioShift& theta, const NoisePath& noise,
                             const JumpMeasure& nu);

struct WeightedMean {
  double value = 0.0;           // sum Z X / sum Z
  double standard_error = 0.0;  // delta method
  double raw = 0.0;             // sum Z X / n
  double raw_standard_error = 0.0;
  double weight_mean = 0.0;  // sample E[Z]
  double weight_second_moment = 0.0;
};

WeightedMean reweighted_expectation(std::span<const double> z, std::span<const double> payoff);

// Bayes-rule conditional expectation: fit(Z X) / fit(Z) on the design rows.
Eigen::VectorXd conditional_reweighted_expectation(std::span<const double> z,
                                                   std::span<const double> payoff,
                                                   const Eigen::MatrixXd& design);

// A shift for every path of an ensemble; a single entry is broadcast.
class ShiftEnsemble {
 public:
  ShiftEnsemble() = default;
  static ShiftEnsemble uniform(ScenarioShift shift);
  static ShiftEnsemble per_path(std::vector<ScenarioShift> shifts);

  const ScenarioShift& operator[](std::size_t path) const {
    return shifts_.size() == 1 ? shifts_.front() : shifts_[path];
  }
  bool is_uniform() const { return shifts_.size() == 1; }
  std::size_t stored() const { return shifts_.size(); }
  bool empty() const { return shifts_.empty(); }

  // Pointwise scaling of theta_B and theta_H.
  ShiftEnsemble scaled(double factor_B, double factor_H) const;

 private:
  std::vector<ScenarioShift> shifts_;
};

// n x (N + 1) density values; throws AdmissibilityError on the first
// inadmissible path.
Eigen::MatrixXd density_paths(const ShiftEnsemble& theta, const PathEnsemble& paths);

struct AdmissibilitySummary {
  bool admissible = true;
  std::size_t violations = 0;
  std::optional<std::size_t> first_path;
  AdmissibilityReport first;
};

AdmissibilitySummary check_scenario_admissible(const ShiftEnsemble& theta,
                                               const PathEnsemble& paths);

struct MarkIntensityCheck {
  std::size_t mark = 0;
  double estimate = 0.0;  // Q-mean of sum_i N_ij
  double expected = 0.0;  // Q-mean of sum_i (1 + theta_j) nu_j lambda_H_i dt
  double discrepancy = 0.0;
  double standard_error = 0.0;
  double max_cell_z = 0.0;  // largest per-cell |discrepancy| / SE
};

struct StructureReport {
  std::vector<MarkIntensityCheck> marks;
  bool consistent = true;  // every mark within `tolerance` standard errors
};

// Reweighted jump intensity versus (1 + theta_H) nu lambda_H for a shift
// constant in (omega, t).
StructureReport structure_check_deterministic_theta(const ScenarioShift& theta,
                                                    const PathEnsemble& paths,
                                                    double tolerance = 3.0);

}  // namespace tchedge
