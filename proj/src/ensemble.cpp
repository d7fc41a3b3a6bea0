#include "tchedge/ensemble.hpp"

#include <cmath>

#include "tchedge/random.hpp"

namespace tchedge {

PathEnsemble simulate_ensemble(const ModelSpec& model, std::size_t paths, std::uint64_t seed) {
  validate(model.intensity.brownian);
  validate(model.intensity.jump);
  const std::size_t n = model.grid.steps();
  const std::size_t J = model.jumps.size();
  const auto rows = static_cast<Eigen::Index>(paths);
  const auto nodes = static_cast<Eigen::Index>(n + 1);
  const auto cells = static_cast<Eigen::Index>(n);

  PathEnsemble e;
  e.grid = model.grid;
  e.jumps = model.jumps;
  e.seed = seed;
  for (Eigen::MatrixXd* m :
       {&e.lambda_B, &e.lambda_H, &e.cum_B, &e.cum_H, &e.s0, &e.s1, &e.brownian, &e.eta}) {
    m->resize(rows, nodes);
  }
  for (Eigen::MatrixXd* m : {&e.shock_B, &e.shock_H, &e.dB, &e.rate, &e.drift, &e.volatility}) {
    m->resize(rows, cells);
  }
  e.counts.assign(J, Eigen::MatrixXd(rows, cells));
  e.compensated.assign(J, Eigen::MatrixXd(rows, cells));
  e.jump_impact.assign(J, Eigen::MatrixXd(rows, cells));

  for (std::size_t p = 0; p < paths; ++p) {
    auto clock_rng = path_stream(seed, p, Stream::intensity);
    auto noise_rng = path_stream(seed, p, Stream::noise);
    const IntensityPath lam = simulate_intensity(model.intensity, model.grid, clock_rng);
    const NoisePath noise = simulate_noise(lam, model.jumps, model.grid, noise_rng);
    const MarketPath market = simulate_market(model.market, noise, model.jumps, model.grid);
    const auto r = static_cast<Eigen::Index>(p);

    double b = 0.0, eta = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const auto c = static_cast<Eigen::Index>(i);
      e.lambda_B(r, c) = lam.lambda_B[i];
      e.lambda_H(r, c) = lam.lambda_H[i];
      e.cum_B(r, c) = lam.cum_B[i];
      e.cum_H(r, c) = lam.cum_H[i];
      e.s0(r, c) = market.s0[i];
      e.s1(r, c) = market.s1[i];
      e.brownian(r, c) = b;
      e.eta(r, c) = eta;
      if (i == n) break;
      e.shock_B(r, c) = lam.shock_B[i];
      e.shock_H(r, c) = lam.shock_H[i];
      e.dB(r, c) = noise.dB[i];
      e.rate(r, c) = market.rate[i];
      e.drift(r, c) = market.drift[i];
      e.volatility(r, c) = market.volatility[i];
      b += noise.dB[i];
      for (std::size_t j = 0; j < J; ++j) {
        e.counts[j](r, c) = static_cast<double>(noise.counts(i, j));
        e.compensated[j](r, c) = noise.compensated(i, j);
        e.jump_impact[j](r, c) = market.jump_impact(i, j);
        eta += model.jumps.mark(j) * noise.compensated(i, j);
      }
    }
  }
  return e;
}

IntensityPath PathEnsemble::intensity_path(std::size_t path) const {
  const auto r = static_cast<Eigen::Index>(path);
  const std::size_t n = steps();
  IntensityPath out;
  out.lambda_B.resize(n + 1);
  out.lambda_H.resize(n + 1);
  out.cum_B.resize(n + 1);
  out.cum_H.resize(n + 1);
  out.shock_B.resize(n);
  out.shock_H.resize(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.lambda_B[i] = lambda_B(r, c);
    out.lambda_H[i] = lambda_H(r, c);
    out.cum_B[i] = cum_B(r, c);
    out.cum_H[i] = cum_H(r, c);
    if (i < n) {
      out.shock_B[i] = shock_B(r, c);
      out.shock_H[i] = shock_H(r, c);
    }
  }
  return out;
}

NoisePath PathEnsemble::noise_path(std::size_t path) const {
  const auto r = static_cast<Eigen::Index>(path);
  const std::size_t n = steps();
  NoisePath out;
  out.dt = dt();
  out.intensity = intensity_path(path);
  out.dB.resize(n);
  out.counts = CellTable<std::int64_t>(n, marks());
  out.compensated = CellTable<double>(n, marks());
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.dB[i] = dB(r, c);
    for (std::size_t j = 0; j < marks(); ++j) {
      out.counts(i, j) = static_cast<std::int64_t>(counts[j](r, c));
      out.compensated(i, j) = compensated[j](r, c);
    }
  }
  return out;
}

MarketPath PathEnsemble::market_path(std::size_t path) const {
  const auto r = static_cast<Eigen::Index>(path);
  const std::size_t n = steps();
  MarketPath out;
  out.s0.resize(n + 1);
  out.s1.resize(n + 1);
  out.rate.resize(n);
  out.drift.resize(n);
  out.volatility.resize(n);
  out.jump_impact = CellTable<double>(n, marks());
  for (std::size_t i = 0; i <= n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    out.s0[i] = s0(r, c);
    out.s1[i] = s1(r, c);
    if (i == n) break;
    out.rate[i] = rate(r, c);
    out.drift[i] = drift(r, c);
    out.volatility[i] = volatility(r, c);
    for (std::size_t j = 0; j < marks(); ++j) out.jump_impact(i, j) = jump_impact[j](r, c);
  }
  return out;
}

Eigen::VectorXd PathEnsemble::discount() const {
  return s0.col(static_cast<Eigen::Index>(steps())).cwiseInverse();
}

}  // namespace tchedge
