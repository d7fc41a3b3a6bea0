#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tchedge/cell_table.hpp"
#include "tchedge/grid.hpp"
#include "tchedge/noise.hpp"

namespace tchedge {

// Information available when coefficients are frozen at a left endpoint.
struct MarketState {
  double t = 0.0;
  double s1 = 0.0;
  double lambda_B = 0.0;
  double lambda_H = 0.0;
};

using Coefficient = std::function<double(const MarketState&)>;
using MarkCoefficient = std::function<double(const MarketState&, std::size_t mark)>;

struct MarketCoefficients {
  Coefficient rate;
  Coefficient drift;
  Coefficient volatility;
  MarkCoefficient jump_impact;
  double rate_bound = 1.0;  // |r| <= rate_bound
  double initial_price = 100.0;

  static MarketCoefficients constant(double r, double alpha, double sigma,
                                     std::vector<double> gamma, double initial_price,
                                     double rate_bound = 1.0);
};

struct MarketPath {
  std::vector<double> s0;    // per node
  std::vector<double> s1;    // per node
  std::vector<double> rate;  // per cell, frozen at the left node
  std::vector<double> drift;
  std::vector<double> volatility;
  CellTable<double> jump_impact;  // per cell and mark

  std::size_t steps() const { return rate.size(); }
};

MarketPath simulate_market(const MarketCoefficients& coeffs, const NoisePath& noise,
                           const JumpMeasure& nu, const TimeGrid& grid);

// Euler wealth recursion; pi has one entry per cell (held over that cell).
std::vector<double> simulate_wealth(std::span<const double> pi, const MarketPath& market,
                                    const NoisePath& noise, double v0);

struct AdmissibilityReport {
  bool admissible = true;
  std::optional<std::size_t> node;
  std::optional<std::size_t> mark;
  std::string message;
  double integrability_sum = 0.0;
};

AdmissibilityReport check_portfolio_admissible(std::span<const double> pi, const MarketPath& market,
                                               const IntensityPath& intensity,
                                               const JumpMeasure& nu, double dt);

}  // namespace tchedge
