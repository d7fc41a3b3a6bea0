#pragma once

#include <vector>

#include "tchedge/ensemble.hpp"

namespace tchedge::test {

inline ModelSpec constant_model(double horizon, std::size_t steps, double lambda_B, double lambda_H,
                                std::vector<double> marks, std::vector<double> weights, double r,
                                double alpha, double sigma, std::vector<double> gamma) {
  ModelSpec m;
  m.grid = TimeGrid(horizon, steps);
  m.intensity = {ConstantIntensity{lambda_B}, ConstantIntensity{lambda_H}};
  m.jumps = JumpMeasure(std::move(marks), std::move(weights));
  m.market = MarketCoefficients::constant(r, alpha, sigma, std::move(gamma), 100.0);
  return m;
}

inline ModelSpec cir_model(double horizon, std::size_t steps, double r, double alpha, double sigma,
                           std::vector<double> gamma) {
  ModelSpec m;
  m.grid = TimeGrid(horizon, steps);
  m.intensity = {CirIntensity{2.0, 1.0, 0.5, 1.0}, CirIntensity{1.5, 1.0, 0.4, 0.8}};
  m.jumps = JumpMeasure({1.0, 2.0}, {0.5, 0.25});
  m.market = MarketCoefficients::constant(r, alpha, sigma, std::move(gamma), 100.0);
  return m;
}

}  // namespace tchedge::test
