#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tchedge/cell_table.hpp"
#include "tchedge/grid.hpp"
#include "tchedge/intensity.hpp"

namespace tchedge {

// Finite mark grid: jump sizes z_j != 0 with rates nu_j > 0.
class JumpMeasure {
 public:
  JumpMeasure(std::vector<double> marks, std::vector<double> weights);

  std::size_t size() const { return marks_.size(); }
  const std::vector<double>& marks() const { return marks_; }
  const std::vector<double>& weights() const { return weights_; }
  double mark(std::size_t j) const { return marks_[j]; }
  double weight(std::size_t j) const { return weights_[j]; }
  double total_mass() const;
  double second_moment() const;  // sum z_j^2 nu_j
  std::optional<std::size_t> index_of(double z) const;

  bool operator==(const JumpMeasure& other) const = default;

 private:
  std::vector<double> marks_;
  std::vector<double> weights_;
};

struct NoisePath {
  std::vector<double> dB;          // per cell
  CellTable<std::int64_t> counts;  // N_ij
  CellTable<double> compensated;   // N_ij - nu_j lambda_H_i dt
  IntensityPath intensity;
  double dt = 0.0;

  std::size_t steps() const { return dB.size(); }
};

struct IntegrandField {
  std::vector<double> phi_B;  // per cell
  CellTable<double> phi_H;    // per cell and mark
};

NoisePath simulate_noise(const IntensityPath& intensity, const JumpMeasure& nu,
                         const TimeGrid& grid, std::mt19937_64& rng);

double ito_integral(const NoisePath& path, const IntegrandField& phi);

// Grid norm sum phi_B^2 lambda_B dt + sum phi_H^2 nu lambda_H dt on one path.
double integrand_norm_squared(const IntegrandField& phi, const IntensityPath& intensity,
                              const JumpMeasure& nu, double dt);

// B_t and eta_t = sum z_j H~_j at a node.
double brownian_value(const NoisePath& path, std::size_t node);
double jump_value(const NoisePath& path, std::size_t node, const JumpMeasure& nu);

enum class NoiseComponent { brownian, eta };

struct CharEstimate {
  std::complex<double> value;
  double se_real = 0.0;
  double se_imag = 0.0;
};

// Sample mean of exp(i c X) with standard errors of both parts.
CharEstimate empirical_char_function(std::span<const double> samples, double c);
CharEstimate empirical_char_function(std::span<const NoisePath> paths, double c, std::size_t node,
                                     NoiseComponent component, const JumpMeasure& nu);

// Closed forms given cumulative measures. The Gaussian factor carries the
// negative sign required by a normal law.
std::complex<double> brownian_char_function(double c, double cum_B);
std::complex<double> eta_char_function(double c, double cum_H, const JumpMeasure& nu);

// Running sum of x_i y_i (+ jump co-movements), N + 1 entries from 0.
std::vector<double> quadratic_covariation(std::span<const double> x, std::span<const double> y,
                                          std::span<const double> jump_products = {});

}  // namespace tchedge
