#include "tchedge/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tchedge/error.hpp"
#include "tchedge/regression.hpp"

namespace tchedge {
namespace {

using Eigen::Index;

Index idx(std::size_t v) { return static_cast<Index>(v); }

// True when every column of m is constant across paths.
bool cross_sectionally_constant(const Eigen::MatrixXd& m) {
  return (m.rowwise() - m.row(0)).isZero(0.0);
}

}  // namespace

ClaimSpec ClaimSpec::call(double strike) {
  return {"call", [strike](const PathEnsemble& e, std::size_t p) {
            return std::max(e.s1(idx(p), idx(e.steps())) - strike, 0.0);
          }};
}

ClaimSpec ClaimSpec::put(double strike) {
  return {"put", [strike](const PathEnsemble& e, std::size_t p) {
            return std::max(strike - e.s1(idx(p), idx(e.steps())), 0.0);
          }};
}

ClaimSpec ClaimSpec::digital(double strike, double payout) {
  return {"digital", [strike, payout](const PathEnsemble& e, std::size_t p) {
            return e.s1(idx(p), idx(e.steps())) > strike ? payout : 0.0;
          }};
}

ClaimSpec ClaimSpec::intensity_exponential(double rate, double notional) {
  return {"intensity_exponential", [rate, notional](const PathEnsemble& e, std::size_t p) {
            const Index N = idx(e.steps());
            return notional * e.s0(idx(p), N) * std::exp(-rate * e.cum_B(idx(p), N));
          }};
}

ClaimSpec ClaimSpec::zero() {
  return {"zero", [](const PathEnsemble&, std::size_t) { return 0.0; }};
}

Eigen::VectorXd evaluate(const ClaimSpec& claim, const PathEnsemble& paths) {
  Eigen::VectorXd out(idx(paths.size()));
  for (std::size_t p = 0; p < paths.size(); ++p) {
    out(idx(p)) = claim.payoff(paths, p);
    if (!std::isfinite(out(idx(p)))) {
      throw SpecError("claim " + claim.name + " is not finite on path " + std::to_string(p));
    }
  }
  if (!std::isfinite(out.squaredNorm())) {
    throw SpecError("claim " + claim.name + " has an infinite sample second moment");
  }
  return out;
}

double drift_residual(double rate, double drift, double volatility, std::span<const double> gamma,
                      double lambda_B, double lambda_H, const JumpMeasure& nu, double theta_B,
                      std::span<const double> theta_H) {
  double res = (drift - rate) + volatility * theta_B * lambda_B;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    res += gamma[j] * theta_H[j] * nu.weight(j) * lambda_H;
  }
  return res;
}

NodeScenario solve_market_price_node(double rate, double drift, double volatility,
                                     std::span<const double> gamma, double lambda_B,
                                     double lambda_H, const JumpMeasure& nu) {
  if (gamma.size() != nu.size()) throw std::invalid_argument("one jump impact per mark");
  double den = volatility * volatility * lambda_B;
  for (std::size_t j = 0; j < nu.size(); ++j) den += gamma[j] * gamma[j] * nu.weight(j) * lambda_H;
  const double excess = drift - rate;
  NodeScenario s;
  s.theta_H.assign(nu.size(), 0.0);
  if (!(den > 0.0)) {
    if (excess != 0.0) {
      throw SpecError(
          "no admissible scenario solves the drift equation: no traded risk while "
          "alpha != r");
    }
    return s;
  }
  s.kappa = -excess / den;
  s.theta_B = s.kappa * volatility;
  for (std::size_t j = 0; j < nu.size(); ++j) s.theta_H[j] = s.kappa * gamma[j];
  s.residual =
      drift_residual(rate, drift, volatility, gamma, lambda_B, lambda_H, nu, s.theta_B, s.theta_H);
  return s;
}

WorstCaseScenario solve_market_price_equation(const PathEnsemble& paths, double bound,
                                              Filtration filtration) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  bool uniform =
      cross_sectionally_constant(paths.rate) && cross_sectionally_constant(paths.drift) &&
      cross_sectionally_constant(paths.volatility) && cross_sectionally_constant(paths.lambda_B) &&
      cross_sectionally_constant(paths.lambda_H);
  for (std::size_t j = 0; j < J && uniform; ++j) {
    uniform = cross_sectionally_constant(paths.jump_impact[j]);
  }
  const std::size_t solved = uniform ? 1 : n;

  WorstCaseScenario out;
  out.rule = SelectionRule::minimal_norm;
  out.kappa.resize(idx(n), idx(N));
  std::vector<ScenarioShift> shifts;
  shifts.reserve(solved);
  std::vector<double> gamma(J);
  for (std::size_t p = 0; p < solved; ++p) {
    const Index r = idx(p);
    ScenarioShift s;
    s.theta_B.assign(N, 0.0);
    s.theta_H = CellTable<double>(N, J, 0.0);
    s.bound = bound;
    s.filtration = filtration;
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      for (std::size_t j = 0; j < J; ++j) gamma[j] = paths.jump_impact[j](r, c);
      NodeScenario node;
      try {
        node =
            solve_market_price_node(paths.rate(r, c), paths.drift(r, c), paths.volatility(r, c),
                                    gamma, paths.lambda_B(r, c), paths.lambda_H(r, c), paths.jumps);
      } catch (const SpecError& e) {
        throw SpecError(std::string(e.what()) + " (path " + std::to_string(p) + ", node " +
                        std::to_string(i) + ")");
      }
      s.theta_B[i] = node.theta_B;
      for (std::size_t j = 0; j < J; ++j) s.theta_H(i, j) = node.theta_H[j];
      out.max_residual = std::max(out.max_residual, std::abs(node.residual));
      if (uniform) {
        out.kappa.col(c).setConstant(node.kappa);
      } else {
        out.kappa(r, c) = node.kappa;
      }
    }
    const auto report = check_scenario_admissible(s, paths.intensity_path(p), paths.jumps);
    if (!report.admissible) {
      throw AdmissibilityError("worst-case scenario is not admissible on path " +
                                   std::to_string(p) + ": " + report.message,
                               report.node, report.mark);
    }
    shifts.push_back(std::move(s));
  }
  out.theta_hat = uniform ? ShiftEnsemble::uniform(std::move(shifts.front()))
                          : ShiftEnsemble::per_path(std::move(shifts));
  return out;
}

WorstCaseScenario user_scenario(ShiftEnsemble theta, const PathEnsemble& paths, double tolerance) {
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  WorstCaseScenario out;
  out.rule = SelectionRule::user_supplied;
  out.kappa = Eigen::MatrixXd::Zero(idx(paths.size()), idx(N));
  const auto summary = check_scenario_admissible(theta, paths);
  if (!summary.admissible) {
    throw AdmissibilityError("user scenario is not admissible on path " +
                                 std::to_string(*summary.first_path) + ": " + summary.first.message,
                             summary.first.node, summary.first.mark);
  }
  std::vector<double> gamma(J), th(J);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Index r = idx(p);
    const ScenarioShift& s = theta[p];
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      for (std::size_t j = 0; j < J; ++j) {
        gamma[j] = paths.jump_impact[j](r, c);
        th[j] = s.theta_H(i, j);
      }
      const double res =
          drift_residual(paths.rate(r, c), paths.drift(r, c), paths.volatility(r, c), gamma,
                         paths.lambda_B(r, c), paths.lambda_H(r, c), paths.jumps, s.theta_B[i], th);
      out.max_residual = std::max(out.max_residual, std::abs(res));
    }
  }
  if (!(out.max_residual <= tolerance)) {
    std::ostringstream msg;
    msg << "user scenario violates the drift equation (residual " << out.max_residual << ")";
    throw SpecError(msg.str());
  }
  out.theta_hat = std::move(theta);
  return out;
}

Representation martingale_representation(const ClaimSpec& claim, const WorstCaseScenario& scenario,
                                         Filtration filtration, const PathEnsemble& paths,
                                         const Basis& basis) {
  return martingale_representation(evaluate(claim, paths), scenario, filtration, paths, basis);
}

Representation martingale_representation(const Eigen::VectorXd& claim_values,
                                         const WorstCaseScenario& scenario, Filtration filtration,
                                         const PathEnsemble& paths, const Basis& basis) {
  if (basis.filtration() != filtration) {
    throw std::invalid_argument("basis filtration does not match the requested filtration");
  }
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  Representation rep;
  rep.filtration = filtration;
  rep.discounted_claim = claim_values.cwiseProduct(paths.discount());

  BackwardOptions options;
  options.measure = &scenario.theta_hat;
  const BSDESolution sol = solve_backward_regression(
      DriverSpec::zero(filtration), std::span<const double>(rep.discounted_claim.data(), n), paths,
      basis, options);
  rep.value = sol.y;
  rep.z_hat = sol.z;
  rep.u_hat = sol.u;
  rep.orthogonal = sol.n_increments;
  rep.diagnostics = sol.diagnostics;

  if (filtration == Filtration::F) {
    rep.xi0 = rep.value.col(0) + rep.orthogonal.rowwise().sum();
  } else {
    const Eigen::MatrixXd z = density_paths(scenario.theta_hat, paths);
    const Eigen::VectorXd zt = z.col(idx(N));
    rep.xi0 = conditional_reweighted_expectation(
        std::span<const double>(zt.data(), n),
        std::span<const double>(rep.discounted_claim.data(), n), intensity_design(paths));
  }
  return rep;
}

PortfolioFit optimal_portfolio(const Representation& rep, const PathEnsemble& paths) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  PortfolioFit fit;
  fit.pi = Eigen::MatrixXd::Zero(idx(n), idx(N));
  fit.residual_B = Eigen::MatrixXd::Zero(idx(n), idx(N));
  fit.residual_H = Eigen::MatrixXd::Zero(idx(n), idx(N));
  for (std::size_t p = 0; p < n; ++p) {
    const Index r = idx(p);
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      const double growth = paths.s0(r, c);
      const double sigma = paths.volatility(r, c);
      const double lb = paths.lambda_B(r, c);
      const double lh = paths.lambda_H(r, c);
      const double zb = growth * rep.z_hat(r, c);
      double num = sigma * lb * zb;
      double den = sigma * sigma * lb;
      for (std::size_t j = 0; j < J; ++j) {
        const double g = paths.jump_impact[j](r, c);
        const double w = paths.jumps.weight(j) * lh;
        num += g * w * growth * rep.u_hat[j](r, c);
        den += g * g * w;
      }
      double pi = 0.0;
      if (den > 0.0) {
        pi = num / den;
      } else {
        ++fit.degenerate;
      }
      fit.pi(r, c) = pi;
      fit.residual_B(r, c) = (zb - pi * sigma) * lb;
      double rh = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        rh += (growth * rep.u_hat[j](r, c) - pi * paths.jump_impact[j](r, c)) *
              paths.jumps.weight(j) * lh;
      }
      fit.residual_H(r, c) = rh;
    }
  }
  return fit;
}

HedgeResult optimal_price_and_cost(const Eigen::VectorXd& claim_values,
                                   const WorstCaseScenario& scenario, const Representation& rep,
                                   const PortfolioFit& portfolio, const PathEnsemble& paths) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  const Index NN = idx(N);

  HedgeResult h;
  h.filtration = rep.filtration;
  h.scenario = scenario;
  h.pi_hat = portfolio.pi;
  h.z_hat = rep.z_hat;
  h.u_hat = rep.u_hat;
  h.residual_B = portfolio.residual_B;
  h.residual_H = portfolio.residual_H;
  h.xi0 = rep.xi0;
  h.claim = claim_values;
  h.degenerate_nodes = portfolio.degenerate;
  h.diagnostics = rep.diagnostics;

  h.y_hat = paths.s0.cwiseProduct(rep.value);
  h.y_hat.col(NN) = claim_values;
  if (rep.filtration == Filtration::G) h.y_hat.col(0) = rep.xi0;
  h.v = rep.filtration == Filtration::F ? rep.value.col(0).mean() : rep.xi0.mean();

  h.wealth.resize(idx(n), NN + 1);
  for (std::size_t p = 0; p < n; ++p) {
    const Index r = idx(p);
    double v = h.v;
    h.wealth(r, 0) = v;
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      const double pi = h.pi_hat(r, c);
      double dv = (v * paths.rate(r, c) + pi * (paths.drift(r, c) - paths.rate(r, c))) * dt +
                  pi * paths.volatility(r, c) * paths.dB(r, c);
      for (std::size_t j = 0; j < J; ++j) {
        dv += pi * paths.jump_impact[j](r, c) * paths.compensated[j](r, c);
      }
      v += dv;
      h.wealth(r, c + 1) = v;
    }
  }
  h.gap = h.y_hat - h.wealth;
  h.cost = h.gap;
  h.predicted_cost = Eigen::MatrixXd::Zero(idx(n), NN + 1);
  if (rep.filtration == Filtration::G) {
    for (Index c = 1; c <= NN; ++c) {
      h.cost.col(c) -= paths.s0.col(c).cwiseProduct(h.gap.col(0));
    }
    h.predicted_cost.col(0) = rep.xi0.array() - h.v;
  } else {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(idx(n));
    for (Index c = 1; c <= NN; ++c) {
      acc += rep.orthogonal.col(c - 1);
      h.predicted_cost.col(c) = paths.s0.col(c).cwiseProduct(acc);
    }
  }
  return h;
}

HedgeResult hedge_claim(const ClaimSpec& claim, const PathEnsemble& paths, const Basis& basis,
                        Filtration filtration, double bound) {
  const Eigen::VectorXd values = evaluate(claim, paths);
  const WorstCaseScenario scenario = solve_market_price_equation(paths, bound, filtration);
  const Representation rep = martingale_representation(values, scenario, filtration, paths, basis);
  const PortfolioFit fit = optimal_portfolio(rep, paths);
  return optimal_price_and_cost(values, scenario, rep, fit, paths);
}

double hedge_driver(const DriverPoint& pt, const JumpMeasure& nu, double pi, double theta_B,
                    std::span<const double> theta_H) {
  double g = -pt.y * pt.rate - pi * (pt.drift - pt.rate) -
             (pi * pt.volatility - pt.growth * pt.z) * theta_B * pt.lambda_B;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    g -= (pi * pt.gamma[j] - pt.growth * pt.u[j]) * theta_H[j] * nu.weight(j) * pt.lambda_H;
  }
  return g;
}

RiskEstimate risk_measure(std::span<const double> position,
                          const std::vector<ShiftEnsemble>& family, std::size_t node,
                          const PathEnsemble& paths, const Basis& basis) {
  if (family.empty()) throw std::invalid_argument("empty scenario family");
  if (position.size() != paths.size()) {
    throw std::invalid_argument("position sample does not match the ensemble");
  }
  if (node > paths.steps()) throw std::out_of_range("risk node outside the grid");
  const std::size_t n = paths.size();
  const Index NN = idx(paths.steps());
  std::vector<double> loss(n);
  for (std::size_t p = 0; p < n; ++p) loss[p] = -position[p];

  RiskEstimate out;
  out.per_path = Eigen::VectorXd::Constant(idx(n), -std::numeric_limits<double>::infinity());
  const Eigen::MatrixXd design = node > 0 ? basis.design(paths, node) : Eigen::MatrixXd();
  for (std::size_t s = 0; s < family.size(); ++s) {
    const auto summary = check_scenario_admissible(family[s], paths);
    if (!summary.admissible) {
      throw AdmissibilityError(
          "risk scenario " + std::to_string(s) + " is not admissible: " + summary.first.message,
          summary.first.node, summary.first.mark);
    }
    const Eigen::MatrixXd z = density_paths(family[s], paths);
    const Eigen::VectorXd zt = z.col(NN);
    const double value = reweighted_expectation(std::span<const double>(zt.data(), n), loss).value;
    out.scenario_values.push_back(value);
    if (s == 0 || value > out.value) {
      out.value = value;
      out.argmax = s;
    }
    if (node == 0) {
      out.per_path = out.per_path.cwiseMax(value);
    } else {
      const Eigen::VectorXd ratio = zt.cwiseQuotient(z.col(idx(node)));
      const Eigen::VectorXd cond = conditional_reweighted_expectation(
          std::span<const double>(ratio.data(), n), loss, design);
      out.per_path = out.per_path.cwiseMax(cond);
    }
  }
  return out;
}

std::vector<ShiftEnsemble> scenario_family(const WorstCaseScenario& scenario,
                                           const std::vector<double>& scalings,
                                           const std::vector<double>& jump_tilts) {
  std::vector<ShiftEnsemble> family;
  for (double s : scalings) family.push_back(scenario.theta_hat.scaled(s, s));
  const ScenarioShift& first = scenario.theta_hat[0];
  const std::size_t J = first.theta_H.marks();
  for (double tilt : jump_tilts) {
    if (tilt == 0.0) continue;
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<ScenarioShift> shifts;
      const std::size_t stored = scenario.theta_hat.stored();
      for (std::size_t p = 0; p < stored; ++p) {
        ScenarioShift s = scenario.theta_hat[p];
        for (std::size_t i = 0; i < s.theta_H.cells(); ++i) s.theta_H(i, j) += tilt;
        shifts.push_back(std::move(s));
      }
      family.push_back(stored == 1 ? ShiftEnsemble::uniform(std::move(shifts.front()))
                                   : ShiftEnsemble::per_path(std::move(shifts)));
    }
  }
  return family;
}

namespace {

// X = e^{-int r} F - sum_i D_i pi_i drift_i(theta) dt per path.
Eigen::VectorXd saddle_payoff(const HedgeResult& h, const PathEnsemble& paths,
                              const ShiftEnsemble& theta, double pi_factor) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const double dt = paths.dt();
  Eigen::VectorXd x = h.claim.cwiseProduct(paths.discount());
  for (std::size_t p = 0; p < n; ++p) {
    const Index r = idx(p);
    const ScenarioShift& s = theta[p];
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      double drift = (paths.drift(r, c) - paths.rate(r, c)) +
                     paths.volatility(r, c) * s.theta_B[i] * paths.lambda_B(r, c);
      for (std::size_t j = 0; j < J; ++j) {
        drift += paths.jump_impact[j](r, c) * s.theta_H(i, j) * paths.jumps.weight(j) *
                 paths.lambda_H(r, c);
      }
      acc += pi_factor * h.pi_hat(r, c) / paths.s0(r, c) * drift * dt;
    }
    x(r) -= acc;
  }
  return x;
}

}  // namespace

SaddleReport verify_saddle(const HedgeResult& h, const PathEnsemble& paths,
                           const std::vector<double>& factors, double tolerance_multiplier) {
  const std::size_t n = paths.size();
  const std::size_t N = paths.steps();
  const std::size_t J = paths.marks();
  const Index NN = idx(N);
  const ShiftEnsemble& theta_hat = h.scenario.theta_hat;
  SaddleReport report;

  // Driver level.
  DriverPoint pt;
  pt.u.resize(J);
  pt.gamma.resize(J);
  std::vector<double> th(J), scaled(J);
  // Per path sum of e^{-R_t} (g(perturbed) - g(pi_hat, theta_hat)) dt: the
  // first-order change of Y_0 implied by the driver, per factor.
  const double dt = paths.dt();
  std::vector<Eigen::VectorXd> drift_t(factors.size(), Eigen::VectorXd::Zero(idx(n)));
  std::vector<Eigen::VectorXd> drift_b = drift_t, drift_p = drift_t;
  for (std::size_t p = 0; p < n; ++p) {
    const Index r = idx(p);
    const ScenarioShift& s = theta_hat[p];
    for (std::size_t i = 0; i < N; ++i) {
      const Index c = idx(i);
      pt.y = h.y_hat(r, c);
      pt.z = h.z_hat(r, c);
      pt.rate = paths.rate(r, c);
      pt.drift = paths.drift(r, c);
      pt.volatility = paths.volatility(r, c);
      pt.lambda_B = paths.lambda_B(r, c);
      pt.lambda_H = paths.lambda_H(r, c);
      pt.growth = paths.s0(r, c);
      for (std::size_t j = 0; j < J; ++j) {
        pt.u[j] = h.u_hat[j](r, c);
        pt.gamma[j] = paths.jump_impact[j](r, c);
        th[j] = s.theta_H(i, j);
      }
      const double pi = h.pi_hat(r, c);
      const double g0 = hedge_driver(pt, paths.jumps, pi, s.theta_B[i], th);
      const double scale = 1.0 + std::abs(g0) + std::abs(pt.y);
      for (std::size_t k = 0; k < factors.size(); ++k) {
        const double f = factors[k];
        for (std::size_t j = 0; j < J; ++j) scaled[j] = f * th[j];
        const double gt = hedge_driver(pt, paths.jumps, pi, f * s.theta_B[i], scaled);
        const double gb = hedge_driver(pt, paths.jumps, pi, f * s.theta_B[i], th);
        const double gp = hedge_driver(pt, paths.jumps, f * pi, s.theta_B[i], th);
        report.driver_max_theta_excess =
            std::max(report.driver_max_theta_excess, (gt - g0) / scale);
        report.driver_max_theta_B_only_excess =
            std::max(report.driver_max_theta_B_only_excess, gb - g0);
        report.driver_max_pi_excess = std::max(report.driver_max_pi_excess, (g0 - gp) / scale);
        drift_t[k](r) += (gt - g0) * dt / pt.growth;
        drift_b[k](r) += (gb - g0) * dt / pt.growth;
        drift_p[k](r) += (gp - g0) * dt / pt.growth;
      }
    }
  }
  // Whole-theta and pi excesses are relative to the node scale.
  report.driver_passed =
      report.driver_max_theta_excess <= 1e-9 && report.driver_max_pi_excess <= 1e-9;

  // Simulation level.
  const Eigen::MatrixXd z_hat = density_paths(theta_hat, paths);
  const Eigen::VectorXd w0 = z_hat.col(NN);
  const Eigen::VectorXd x0 = saddle_payoff(h, paths, theta_hat, 1.0);
  const auto base = reweighted_expectation(std::span<const double>(w0.data(), n),
                                           std::span<const double>(x0.data(), n));
  report.saddle_value = base.value;
  report.saddle_standard_error = base.standard_error;
  const double floor = 1e-12 * (1.0 + std::abs(base.value));

  auto compare = [&](const std::string& label, double pf, double fb, double fh,
                     const Eigen::VectorXd& drift) {
    SaddleCheck check;
    check.predicted_difference = w0.dot(drift) / w0.sum();
    check.label = label;
    check.pi_factor = pf;
    check.theta_B_factor = fb;
    check.theta_H_factor = fh;
    const ShiftEnsemble theta = (fb == 1.0 && fh == 1.0) ? theta_hat : theta_hat.scaled(fb, fh);
    const Eigen::VectorXd w1 =
        (fb == 1.0 && fh == 1.0) ? w0 : Eigen::VectorXd(density_paths(theta, paths).col(NN));
    const Eigen::VectorXd x1 = saddle_payoff(h, paths, theta, pf);
    const auto m1 = reweighted_expectation(std::span<const double>(w1.data(), n),
                                           std::span<const double>(x1.data(), n));
    check.value = m1.value;
    check.difference = m1.value - base.value;
    const double mw1 = w1.mean();
    const double mw0 = w0.mean();
    double ss = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const Index r = idx(p);
      const double psi = w1(r) * (x1(r) - m1.value) / mw1 - w0(r) * (x0(r) - base.value) / mw0;
      ss += psi * psi;
    }
    check.standard_error = std::sqrt(ss) / static_cast<double>(n);
    check.tolerance = tolerance_multiplier * check.standard_error + floor;
    // Scenario perturbations may not raise the value; portfolio ones may not lower it.
    check.passed =
        pf == 1.0 ? check.difference <= check.tolerance : check.difference >= -check.tolerance;
    report.simulation.push_back(check);
  };
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const double f = factors[k];
    std::ostringstream a, b, c;
    a << "theta x" << f;
    b << "theta_B x" << f;
    c << "pi x" << f;
    compare(a.str(), 1.0, f, f, drift_t[k]);
    compare(b.str(), 1.0, f, 1.0, drift_b[k]);
    compare(c.str(), f, 1.0, 1.0, drift_p[k]);
  }
  report.passed = report.driver_passed;
  for (const auto& c : report.simulation) report.passed = report.passed && c.passed;
  return report;
}

}  // namespace tchedge
