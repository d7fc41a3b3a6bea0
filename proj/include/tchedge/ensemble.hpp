#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tchedge/grid.hpp"
#include "tchedge/intensity.hpp"
#include "tchedge/market.hpp"
#include "tchedge/noise.hpp"

namespace tchedge {

struct ModelSpec {
  TimeGrid grid{1.0, 32};
  IntensityModel intensity;
  JumpMeasure jumps{{1.0}, {1.0}};
  MarketCoefficients market = MarketCoefficients::constant(0.0, 0.0, 0.0, {0.0}, 100.0);
};

// Simulated paths stored column-per-node (rows are paths), so that every
// cross-section used by a regression is contiguous.
struct PathEnsemble {
  TimeGrid grid{1.0, 1};
  JumpMeasure jumps{{1.0}, {1.0}};
  std::uint64_t seed = 0;

  // n x (N + 1)
  Eigen::MatrixXd lambda_B, lambda_H, cum_B, cum_H;
  Eigen::MatrixXd s0, s1;
  Eigen::MatrixXd brownian;  // running B
  Eigen::MatrixXd eta;       // running sum z_j H~_j

  // n x N
  Eigen::MatrixXd shock_B, shock_H;
  Eigen::MatrixXd dB;
  std::vector<Eigen::MatrixXd> counts;       // one per mark
  std::vector<Eigen::MatrixXd> compensated;  // one per mark
  Eigen::MatrixXd rate, drift, volatility;
  std::vector<Eigen::MatrixXd> jump_impact;  // one per mark

  std::size_t size() const { return static_cast<std::size_t>(dB.rows()); }
  std::size_t steps() const { return grid.steps(); }
  std::size_t marks() const { return jumps.size(); }
  double dt() const { return grid.dt(); }

  // Per-path views in the single-path types.
  IntensityPath intensity_path(std::size_t path) const;
  NoisePath noise_path(std::size_t path) const;
  MarketPath market_path(std::size_t path) const;

  // exp(-sum r dt) over the whole horizon, per path.
  Eigen::VectorXd discount() const;
};

PathEnsemble simulate_ensemble(const ModelSpec& model, std::size_t paths, std::uint64_t seed);

}  // namespace tchedge
