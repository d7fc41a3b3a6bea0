#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tchedge/basis.hpp"
#include "tchedge/bsde.hpp"
#include "tchedge/ensemble.hpp"
#include "tchedge/girsanov.hpp"

namespace tchedge {

struct ClaimSpec {
  std::string name;
  std::function<double(const PathEnsemble&, std::size_t path)> payoff;

  static ClaimSpec call(double strike);
  static ClaimSpec put(double strike);
  static ClaimSpec digital(double strike, double payout = 1.0);
  // F = notional exp(sum r dt) exp(-rate Lambda^B_T): the discounted claim
  // depends on the clock alone.
  static ClaimSpec intensity_exponential(double rate, double notional = 1.0);
  static ClaimSpec zero();
};

Eigen::VectorXd evaluate(const ClaimSpec& claim, const PathEnsemble& paths);

enum class SelectionRule { minimal_norm, user_supplied };

struct NodeScenario {
  double theta_B = 0.0;
  std::vector<double> theta_H;
  double kappa = 0.0;
  double residual = 0.0;
};

// Minimal <mu>-norm solution of
// (alpha - r) + sigma theta_B lambda_B + sum_j gamma_j theta_j nu_j lambda_H = 0.
NodeScenario solve_market_price_node(double rate, double drift, double volatility,
                                     std::span<const double> gamma, double lambda_B,
                                     double lambda_H, const JumpMeasure& nu);

double drift_residual(double rate, double drift, double volatility, std::span<const double> gamma,
                      double lambda_B, double lambda_H, const JumpMeasure& nu, double theta_B,
                      std::span<const double> theta_H);

struct WorstCaseScenario {
  ShiftEnsemble theta_hat;
  SelectionRule rule = SelectionRule::minimal_norm;
  Eigen::MatrixXd kappa;  // n x N, zero for user-supplied shifts
  double max_residual = 0.0;
};

WorstCaseScenario solve_market_price_equation(const PathEnsemble& paths, double bound,
                                              Filtration filtration = Filtration::F);

// Accepts a user shift after checking the drift equation and admissibility.
WorstCaseScenario user_scenario(ShiftEnsemble theta, const PathEnsemble& paths,
                                double tolerance = 1e-10);

struct Representation {
  Filtration filtration = Filtration::F;
  Eigen::VectorXd discounted_claim;    // e^{-int r} F
  Eigen::MatrixXd value;               // M_i = E_Q[e^{-int r} F | info_i], n x (N + 1)
  Eigen::MatrixXd z_hat;               // n x N
  std::vector<Eigen::MatrixXd> u_hat;  // per mark
  Eigen::MatrixXd orthogonal;          // n x N remainder increments (F case)
  Eigen::VectorXd xi0;                 // F: M_0 + sum n; G: E_Q[e^{-int r} F | F^Lambda]
  std::vector<NodeDiagnostics> diagnostics;
};

Representation martingale_representation(const ClaimSpec& claim, const WorstCaseScenario& scenario,
                                         Filtration filtration, const PathEnsemble& paths,
                                         const Basis& basis);
Representation martingale_representation(const Eigen::VectorXd& claim_values,
                                         const WorstCaseScenario& scenario, Filtration filtration,
                                         const PathEnsemble& paths, const Basis& basis);

struct PortfolioFit {
  Eigen::MatrixXd pi;          // n x N
  Eigen::MatrixXd residual_B;  // (e^R Z - pi sigma) lambda_B
  Eigen::MatrixXd residual_H;  // sum_j (e^R U_j - pi gamma_j) nu_j lambda_H
  std::size_t degenerate = 0;  // nodes with no traded risk, pi set to 0
};

// Per node, pi minimizes (e^R Z - pi sigma)^2 lambda_B
// + sum_j (e^R U_j - pi gamma_j)^2 nu_j lambda_H.
PortfolioFit optimal_portfolio(const Representation& rep, const PathEnsemble& paths);

struct HedgeResult {
  Filtration filtration = Filtration::F;
  WorstCaseScenario scenario;
  Eigen::MatrixXd pi_hat;          // n x N
  Eigen::MatrixXd y_hat;           // n x (N + 1)
  Eigen::MatrixXd wealth;          // n x (N + 1)
  Eigen::MatrixXd cost;            // n x (N + 1)
  Eigen::MatrixXd gap;             // y_hat - wealth
  Eigen::MatrixXd predicted_cost;  // F: s0 sum n; G: zero after t = 0
  Eigen::MatrixXd z_hat;
  std::vector<Eigen::MatrixXd> u_hat;
  Eigen::MatrixXd residual_B, residual_H;
  Eigen::VectorXd xi0;
  Eigen::VectorXd claim;
  double v = 0.0;
  std::size_t degenerate_nodes = 0;
  std::vector<NodeDiagnostics> diagnostics;
};

HedgeResult optimal_price_and_cost(const Eigen::VectorXd& claim_values,
                                   const WorstCaseScenario& scenario, const Representation& rep,
                                   const PortfolioFit& portfolio, const PathEnsemble& paths);

// Full pipeline for one claim.
HedgeResult hedge_claim(const ClaimSpec& claim, const PathEnsemble& paths, const Basis& basis,
                        Filtration filtration, double bound);

// The Hamiltonian g(pi, theta) evaluated at (y, z, u) on one node.
struct DriverPoint {
  double y = 0.0, z = 0.0;
  std::vector<double> u;
  double rate = 0.0, drift = 0.0, volatility = 0.0;
  std::vector<double> gamma;
  double lambda_B = 0.0, lambda_H = 0.0;
  double growth = 1.0;  // e^{int_0^t r}
};

double hedge_driver(const DriverPoint& point, const JumpMeasure& nu, double pi, double theta_B,
                    std::span<const double> theta_H);

struct RiskEstimate {
  Eigen::VectorXd per_path;             // rho_t per path (constant at t = 0)
  std::vector<double> scenario_values;  // t = 0 values per scenario
  std::size_t argmax = 0;
  double value = 0.0;  // t = 0 value (max over family)
};

// Lower bound of the coherent risk measure over a finite scenario family.
RiskEstimate risk_measure(std::span<const double> position,
                          const std::vector<ShiftEnsemble>& family, std::size_t node,
                          const PathEnsemble& paths, const Basis& basis);

// kappa-scalings and per-mark tilts around a worst-case scenario.
std::vector<ShiftEnsemble> scenario_family(const WorstCaseScenario& scenario,
                                           const std::vector<double>& scalings,
                                           const std::vector<double>& jump_tilts);

struct SaddleCheck {
  std::string label;
  double pi_factor = 1.0;
  double theta_B_factor = 1.0;
  double theta_H_factor = 1.0;
  double value = 0.0;                 // Y_0 estimate
  double difference = 0.0;            // value - Y_0 at the saddle
  double predicted_difference = 0.0;  // first order, from the driver
  double standard_error = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

struct SaddleReport {
  double saddle_value = 0.0;
  double saddle_standard_error = 0.0;
  std::vector<SaddleCheck> simulation;
  // Driver level, over all (path, node): max of g(pi_hat, theta) - g(pi_hat, theta_hat)
  // and of g(pi_hat, theta_hat) - g(pi, theta_hat), by perturbation.
  double driver_max_theta_excess = 0.0;
  double driver_max_pi_excess = 0.0;
  double driver_max_theta_B_only_excess = 0.0;
  bool driver_passed = true;
  bool passed = true;
};

SaddleReport verify_saddle(const HedgeResult& hedge, const PathEnsemble& paths,
                           const std::vector<double>& factors = {0.9, 1.1},
                           double tolerance_multiplier = 3.0);

}  // namespace tchedge
