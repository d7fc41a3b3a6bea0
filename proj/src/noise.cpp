#include "tchedge/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tchedge/error.hpp"

namespace tchedge {

JumpMeasure::JumpMeasure(std::vector<double> marks, std::vector<double> weights)
    : marks_(std::move(marks)), weights_(std::move(weights)) {
  if (marks_.empty()) throw SpecError("jump measure needs at least one mark");
  if (marks_.size() != weights_.size()) {
    throw SpecError("jump measure marks and weights differ in length");
  }
  for (std::size_t j = 0; j < marks_.size(); ++j) {
    if (marks_[j] == 0.0 || !std::isfinite(marks_[j])) {
      throw SpecError("jump marks must be finite and nonzero");
    }
    if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
      throw SpecError("jump weights must be finite and positive");
    }
    for (std::size_t k = 0; k < j; ++k) {
      if (marks_[k] == marks_[j]) throw SpecError("jump marks must be distinct");
    }
  }
  if (!std::isfinite(second_moment())) throw SpecError("jump measure second moment is infinite");
}

double JumpMeasure::total_mass() const {
  double m = 0.0;
  for (double w : weights_) m += w;
  return m;
}

double JumpMeasure::second_moment() const {
  double m = 0.0;
  for (std::size_t j = 0; j < marks_.size(); ++j) m += marks_[j] * marks_[j] * weights_[j];
  return m;
}

std::optional<std::size_t> JumpMeasure::index_of(double z) const {
  for (std::size_t j = 0; j < marks_.size(); ++j) {
    if (marks_[j] == z) return j;
  }
  return std::nullopt;
}

NoisePath simulate_noise(const IntensityPath& intensity, const JumpMeasure& nu,
                         const TimeGrid& grid, std::mt19937_64& rng) {
  const std::size_t n = grid.steps();
  if (intensity.steps() != n) throw std::invalid_argument("intensity path does not match grid");
  const std::size_t J = nu.size();
  const double dt = grid.dt();

  NoisePath path;
  path.dt = dt;
  path.intensity = intensity;
  path.dB.assign(n, 0.0);
  path.counts = CellTable<std::int64_t>(n, J, 0);
  path.compensated = CellTable<double>(n, J, 0.0);

  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = intensity.lambda_B[i] * dt;
    if (var > 0.0) path.dB[i] = std::sqrt(var) * normal(rng);
    for (std::size_t j = 0; j < J; ++j) {
      const double mean = nu.weight(j) * intensity.lambda_H[i] * dt;
      std::int64_t k = 0;
      if (mean > 0.0) k = std::poisson_distribution<std::int64_t>(mean)(rng);
      path.counts(i, j) = k;
      path.compensated(i, j) = static_cast<double>(k) - mean;
    }
  }
  return path;
}

double ito_integral(const NoisePath& path, const IntegrandField& phi) {
  if (phi.phi_B.size() != path.steps() || phi.phi_H.cells() != path.steps() ||
      phi.phi_H.marks() != path.compensated.marks()) {
    throw std::invalid_argument("integrand does not match the noise grid");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < path.steps(); ++i) {
    total += phi.phi_B[i] * path.dB[i];
    for (std::size_t j = 0; j < path.compensated.marks(); ++j) {
      total += phi.phi_H(i, j) * path.compensated(i, j);
    }
  }
  return total;
}

double integrand_norm_squared(const IntegrandField& phi, const IntensityPath& intensity,
                              const JumpMeasure& nu, double dt) {
  if (phi.phi_B.size() != intensity.steps() || phi.phi_H.cells() != intensity.steps() ||
      phi.phi_H.marks() != nu.size()) {
    throw std::invalid_argument("integrand does not match the intensity grid");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < intensity.steps(); ++i) {
    total += phi.phi_B[i] * phi.phi_B[i] * intensity.lambda_B[i] * dt;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      total += phi.phi_H(i, j) * phi.phi_H(i, j) * nu.weight(j) * intensity.lambda_H[i] * dt;
    }
  }
  return total;
}

double brownian_value(const NoisePath& path, std::size_t node) {
  if (node > path.steps()) throw std::out_of_range("node outside the grid");
  double b = 0.0;
  for (std::size_t i = 0; i < node; ++i) b += path.dB[i];
  return b;
}

double jump_value(const NoisePath& path, std::size_t node, const JumpMeasure& nu) {
  if (node > path.steps()) throw std::out_of_range("node outside the grid");
  double eta = 0.0;
  for (std::size_t i = 0; i < node; ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) eta += nu.mark(j) * path.compensated(i, j);
  }
  return eta;
}

CharEstimate empirical_char_function(std::span<const double> samples, double c) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  const double n = static_cast<double>(samples.size());
  double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
  for (double x : samples) {
    const double cs = std::cos(c * x);
    const double sn = std::sin(c * x);
    sc += cs;
    ss += sn;
    sc2 += cs * cs;
    ss2 += sn * sn;
  }
  const double mc = sc / n;
  const double ms = ss / n;
  CharEstimate out;
  out.value = {mc, ms};
  if (samples.size() > 1) {
    out.se_real = std::sqrt(std::max(sc2 / n - mc * mc, 0.0) / (n - 1.0));
    out.se_imag = std::sqrt(std::max(ss2 / n - ms * ms, 0.0) / (n - 1.0));
  }
  return out;
}

CharEstimate empirical_char_function(std::span<const NoisePath> paths, double c, std::size_t node,
                                     NoiseComponent component, const JumpMeasure& nu) {
  std::vector<double> x;
  x.reserve(paths.size());
  for (const auto& p : paths) {
    x.push_back(component == NoiseComponent::brownian ? brownian_value(p, node)
                                                      : jump_value(p, node, nu));
  }
  return empirical_char_function(x, c);
}

std::complex<double> brownian_char_function(double c, double cum_B) {
  return {std::exp(-0.5 * c * c * cum_B), 0.0};
}

std::complex<double> eta_char_function(double c, double cum_H, const JumpMeasure& nu) {
  std::complex<double> exponent = 0.0;
  const std::complex<double> i(0.0, 1.0);
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const double z = nu.mark(j);
    exponent += nu.weight(j) * (std::exp(i * c * z) - 1.0 - i * c * z);
  }
  return std::exp(cum_H * exponent);
}

std::vector<double> quadratic_covariation(std::span<const double> x, std::span<const double> y,
                                          std::span<const double> jump_products) {
  if (x.size() != y.size() || (!jump_products.empty() && jump_products.size() != x.size())) {
    throw std::invalid_argument("increment sequences differ in length");
  }
  std::vector<double> out(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i + 1] = out[i] + x[i] * y[i] + (jump_products.empty() ? 0.0 : jump_products[i]);
  }
  return out;
}

}  // namespace tchedge
