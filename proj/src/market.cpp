#include "tchedge/market.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tchedge/error.hpp"

namespace tchedge {

MarketCoefficients MarketCoefficients::constant(double r, double alpha, double sigma,
                                                std::vector<double> gamma, double initial_price,
                                                double rate_bound) {
  MarketCoefficients c;
  c.rate = [r](const MarketState&) { return r; };
  c.drift = [alpha](const MarketState&) { return alpha; };
  c.volatility = [sigma](const MarketState&) { return sigma; };
  c.jump_impact = [gamma = std::move(gamma)](const MarketState&, std::size_t j) {
    return j < gamma.size() ? gamma[j] : 0.0;
  };
  c.initial_price = initial_price;
  c.rate_bound = rate_bound;
  return c;
}

MarketPath simulate_market(const MarketCoefficients& coeffs, const NoisePath& noise,
                           const JumpMeasure& nu, const TimeGrid& grid) {
  const std::size_t n = grid.steps();
  if (noise.steps() != n) throw std::invalid_argument("noise path does not match grid");
  if (!(coeffs.initial_price > 1.0)) throw SpecError("initial stock price must exceed 1");
  const std::size_t J = nu.size();
  const double dt = grid.dt();
  const auto& lam = noise.intensity;

  MarketPath m;
  m.s0.assign(n + 1, 1.0);
  m.s1.assign(n + 1, coeffs.initial_price);
  m.rate.assign(n, 0.0);
  m.drift.assign(n, 0.0);
  m.volatility.assign(n, 0.0);
  m.jump_impact = CellTable<double>(n, J, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const MarketState state{grid.time(i), m.s1[i], lam.lambda_B[i], lam.lambda_H[i]};
    const double r = coeffs.rate(state);
    const double alpha = coeffs.drift(state);
    const double sigma = coeffs.volatility(state);
    if (!(std::abs(r) <= coeffs.rate_bound)) {
      std::ostringstream msg;
      msg << "interest rate " << r << " exceeds the bound " << coeffs.rate_bound << " at node "
          << i;
      throw SpecError(msg.str());
    }
    if (!(sigma >= 0.0))
      throw SpecError("volatility must be nonnegative at node " + std::to_string(i));
    m.rate[i] = r;
    m.drift[i] = alpha;
    m.volatility[i] = sigma;

    double log_step = (alpha - 0.5 * sigma * sigma * lam.lambda_B[i]) * dt + sigma * noise.dB[i];
    for (std::size_t j = 0; j < J; ++j) {
      const double g = coeffs.jump_impact(state, j);
      if (!(g > -1.0)) {
        throw AdmissibilityError("jump impact " + std::to_string(g) + " <= -1 at node " +
                                     std::to_string(i) + ", mark " + std::to_string(j),
                                 i, j);
      }
      m.jump_impact(i, j) = g;
      log_step -= g * nu.weight(j) * lam.lambda_H[i] * dt;
      const auto k = noise.counts(i, j);
      if (k > 0) log_step += static_cast<double>(k) * std::log1p(g);
    }
    m.s0[i + 1] = m.s0[i] * std::exp(r * dt);
    m.s1[i + 1] = m.s1[i] * std::exp(log_step);
  }
  return m;
}

std::vector<double> simulate_wealth(std::span<const double> pi, const MarketPath& market,
                                    const NoisePath& noise, double v0) {
  const std::size_t n = market.steps();
  if (pi.size() != n || noise.steps() != n) {
    throw std::invalid_argument("portfolio, market and noise grids differ");
  }
  const double dt = noise.dt;
  std::vector<double> v(n + 1, v0);
  for (std::size_t i = 0; i < n; ++i) {
    double dv = (v[i] * market.rate[i] + pi[i] * (market.drift[i] - market.rate[i])) * dt +
                pi[i] * market.volatility[i] * noise.dB[i];
    for (std::size_t j = 0; j < noise.compensated.marks(); ++j) {
      dv += pi[i] * market.jump_impact(i, j) * noise.compensated(i, j);
    }
    v[i + 1] = v[i] + dv;
  }
  return v;
}

AdmissibilityReport check_portfolio_admissible(std::span<const double> pi, const MarketPath& market,
                                               const IntensityPath& intensity,
                                               const JumpMeasure& nu, double dt) {
  const std::size_t n = market.steps();
  if (pi.size() != n) throw std::invalid_argument("portfolio does not match the market grid");
  AdmissibilityReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pi[i];
    double cell = std::abs(market.drift[i] - market.rate[i]) * std::abs(p) +
                  p * market.volatility[i] * p * market.volatility[i] * intensity.lambda_B[i];
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double pg = p * market.jump_impact(i, j);
      if (report.admissible && !(pg > -1.0)) {
        report.admissible = false;
        report.node = i;
        report.mark = j;
        std::ostringstream msg;
        msg << "pi * gamma = " << pg << " <= -1 at node " << i << ", mark " << j;
        report.message = msg.str();
      }
      cell += pg * pg * nu.weight(j) * intensity.lambda_H[i];
    }
    sum += cell * dt;
  }
  report.integrability_sum = sum;
  if (report.admissible && !std::isfinite(sum)) {
    report.admissible = false;
    report.message = "integrability sum is not finite";
  }
  return report;
}

}  // namespace tchedge
