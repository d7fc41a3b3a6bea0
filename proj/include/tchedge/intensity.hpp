#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "tchedge/grid.hpp"

namespace tchedge {

class JumpMeasure;

struct ConstantIntensity {
  double level = 0.0;
};

// Right-continuous step function; breakpoints are (time, level) with the
// first time equal to 0 and times strictly increasing.
struct PiecewiseIntensity {
  std::vector<std::pair<double, double>> breakpoints;
};

// Square-root diffusion dx = speed (level - x) dt + vol sqrt(x) dW.
struct CirIntensity {
  double speed = 0.0;
  double level = 0.0;
  double vol = 0.0;
  double initial = 0.0;
};

using IntensitySpec = std::variant<ConstantIntensity, PiecewiseIntensity, CirIntensity>;

void validate(const IntensitySpec& spec);
bool is_deterministic(const IntensitySpec& spec);

// Clock rates of the Brownian (B) and jump (H) components.
struct IntensityModel {
  IntensitySpec brownian = ConstantIntensity{1.0};
  IntensitySpec jump = ConstantIntensity{1.0};
};

struct RatePath {
  std::vector<double> rate;   // per node, N + 1 entries
  std::vector<double> shock;  // standard normal driving cell i (0 unless cir)
};

struct IntensityPath {
  std::vector<double> lambda_B;  // per node
  std::vector<double> lambda_H;
  std::vector<double> cum_B;  // cum_B[i] = sum_{k<i} lambda_B[k] dt
  std::vector<double> cum_H;
  std::vector<double> shock_B;  // per cell
  std::vector<double> shock_H;

  std::size_t steps() const { return lambda_B.empty() ? 0 : lambda_B.size() - 1; }
};

// Cir paths use full-truncation Euler: the drift and diffusion see max(x, 0)
// and the reported rate is max(x, 0).
RatePath simulate_rate(const IntensitySpec& spec, const TimeGrid& grid, std::mt19937_64& rng);
IntensityPath simulate_intensity(const IntensityModel& model, const TimeGrid& grid,
                                 std::mt19937_64& rng);

// Running left-endpoint sum of rate * dt, starting at 0.
std::vector<double> cumulate(std::span<const double> rate, double dt);

// Lambda(cells x marks). A mark value of 0 selects the Brownian atom; other
// values must be marks of `nu`. Cells are deduplicated.
double lambda_measure(const IntensityPath& path, std::span<const std::size_t> cells,
                      std::span<const double> marks, const JumpMeasure& nu, double dt);

}  // namespace tchedge
