#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tchedge/basis.hpp"
#include "tchedge/ensemble.hpp"
#include "tchedge/girsanov.hpp"

namespace tchedge {

struct DriverInput {
  std::size_t path = 0;
  std::size_t node = 0;
  double t = 0.0;
  double lambda_B = 0.0;
  double lambda_H = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::span<const double> u;
};

struct DriverSpec {
  std::function<double(const DriverInput&)> g;
  double lipschitz = 0.0;
  Filtration filtration = Filtration::F;

  static DriverSpec zero(Filtration filtration);
};

struct LipschitzProbe {
  double max_ratio = 0.0;  // largest |g(a) - g(b)| / distance over the probes
  bool within_bound = true;
};

// Random argument pairs drawn on sampled (path, node) states. The distance is
// |dy| + |dz| sqrt(lambda_B) + sum |du_j| sqrt(nu_j lambda_H).
LipschitzProbe probe_lipschitz(const DriverSpec& driver, const PathEnsemble& paths,
                               std::size_t probes, std::uint64_t seed);

struct NodeDiagnostics {
  std::size_t node = 0;
  std::size_t columns = 0;    // retained columns of both stages
  double residual_rms = 0.0;  // of Y_{i+1} after both stages
  double condition = 1.0;
  double standard_error = 0.0;  // mean-stage residual rms * sqrt(p / n)
};

struct BSDESolution {
  Eigen::MatrixXd y;                         // n x (N + 1)
  Eigen::MatrixXd z;                         // n x N
  std::vector<Eigen::MatrixXd> u;            // per mark, n x N
  Eigen::MatrixXd n_increments;              // n x N, zero in the G case
  std::vector<NodeDiagnostics> diagnostics;  // indexed by node 0..N-1
  double terminal_residual = 0.0;            // max |y_N - xi|
  std::vector<std::string> warnings;
};

struct BackwardOptions {
  // Regress under Q^theta: one-step density ratios as weights and shifted
  // increments as regressors.
  const ShiftEnsemble* measure = nullptr;
  // Add the clock shocks as F-case regressors so that the orthogonal part
  // they generate does not leak into z and u.
  bool clock_controls = true;
  int picard_iterations = 1;
};

// Least-squares Monte Carlo backward induction. At each node the value
// Y_{i+1} is regressed on [phi, dB, dH~_j] with the increments as control
// variates, the conditional mean being the phi part; the centred value is
// then regressed on [phi dB, phi dH~_j] for z and u. The remainder is the
// orthogonal part.
BSDESolution solve_backward_regression(const DriverSpec& driver, std::span<const double> terminal,
                                       const PathEnsemble& paths, const Basis& basis,
                                       const BackwardOptions& options = {});

// Driver g = A y + C + E0 z sqrt(lambda_B) + sum_j E_j u_j nu_j sqrt(lambda_H).
struct LinearCoefficients {
  Eigen::MatrixXd A, C, E0;        // n x N
  std::vector<Eigen::MatrixXd> E;  // per mark, n x N
  double bound_A = 1.0;
  double bound_E = 1.0;

  static LinearCoefficients constant(const PathEnsemble& paths, double A, double C, double E0,
                                     const std::vector<double>& E, double bound_A, double bound_E);
};

// |A| <= K_A, |E0| < K_E and 0 <= E_j < K_E z_j; throws SpecError otherwise.
void validate(const LinearCoefficients& coeffs, const PathEnsemble& paths);
DriverSpec linear_driver(const LinearCoefficients& coeffs, const PathEnsemble& paths);

struct LinearSolution {
  Eigen::MatrixXd y;        // n x (N + 1)
  Eigen::MatrixXd adjoint;  // Gamma or Psi, n x (N + 1)
  std::vector<NodeDiagnostics> diagnostics;
};

LinearSolution solve_linear_gamma(const LinearCoefficients& coeffs,
                                  std::span<const double> terminal, const PathEnsemble& paths,
                                  const Basis& basis);

// Driver g = (a0 y + b0 z + c0) lambda_B + sum_j (a_j y + b_j u_j + c_j) nu_j lambda_H.
// Index 0 of each vector is the Brownian atom, index j + 1 mark j.
struct AdjointCoefficients {
  std::vector<Eigen::MatrixXd> a, b, c;  // each J + 1 entries of n x N

  static AdjointCoefficients constant(const PathEnsemble& paths, const std::vector<double>& a,
                                      const std::vector<double>& b, const std::vector<double>& c);
};

DriverSpec adjoint_driver(const AdjointCoefficients& coeffs, const PathEnsemble& paths);

LinearSolution solve_linear_psi(const AdjointCoefficients& coeffs, std::span<const double> terminal,
                                const PathEnsemble& paths, const Basis& basis);

struct ComparisonParams {
  DriverSpec driver;
  std::vector<double> terminal;
};

struct ComparisonReport {
  bool hypotheses_satisfied = true;
  std::string message;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double violation_fraction = 0.0;
  double max_excess = 0.0;  // max of y1 - y2 - tol
  std::vector<double> node_tolerance;
  BSDESolution first, second;
};

// Solves both equations on the shared ensemble and counts (path, node)
// pairs with y1 > y2 + tol_i, tol_i = multiplier * sqrt(se1_i^2 + se2_i^2)
// + absolute_tolerance.
ComparisonReport comparison_harness(const ComparisonParams& first, const ComparisonParams& second,
                                    const PathEnsemble& paths, const Basis& basis,
                                    double multiplier = 3.0, double absolute_tolerance = 0.0);

struct InformationOrdering {
  std::vector<double> residual_F;  // per node, sum of squared residuals
  std::vector<double> residual_G;
  bool ordered = true;
};

// Residual sums of E[target_{i+1} | basis_i] for the F basis and its G
// extension; the G residual can never exceed the F residual.
InformationOrdering information_ordering(const Eigen::MatrixXd& values, const PathEnsemble& paths,
                                         const std::vector<FeatureGroup>& groups);

}  // namespace tchedge
