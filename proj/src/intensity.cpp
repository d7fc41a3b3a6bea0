#include "tchedge/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tchedge/error.hpp"
#include "tchedge/noise.hpp"

namespace tchedge {
namespace {

void require_level(double level, const char* what) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw SpecError(std::string(what) + " must be finite and nonnegative");
  }
}

double piecewise_level(const PiecewiseIntensity& spec, double t) {
  double level = spec.breakpoints.front().second;
  for (const auto& [time, value] : spec.breakpoints) {
    if (time <= t + 1e-12)
      level = value;
    else
      break;
  }
  return level;
}

}  // namespace

void validate(const IntensitySpec& spec) {
  if (const auto* c = std::get_if<ConstantIntensity>(&spec)) {
    require_level(c->level, "constant intensity level");
  } else if (const auto* p = std::get_if<PiecewiseIntensity>(&spec)) {
    if (p->breakpoints.empty()) throw SpecError("piecewise intensity needs breakpoints");
    if (p->breakpoints.front().first != 0.0) {
      throw SpecError("piecewise intensity must start at time 0");
    }
    for (std::size_t k = 0; k < p->breakpoints.size(); ++k) {
      require_level(p->breakpoints[k].second, "piecewise intensity level");
      if (k > 0 && !(p->breakpoints[k].first > p->breakpoints[k - 1].first)) {
        throw SpecError("piecewise intensity times must be strictly increasing");
      }
    }
  } else {
    const auto& c = std::get<CirIntensity>(spec);
    require_level(c.speed, "cir speed");
    require_level(c.level, "cir level");
    require_level(c.vol, "cir vol");
    require_level(c.initial, "cir initial level");
    if (!(c.initial > 0.0)) throw SpecError("cir initial level must be positive");
  }
}

bool is_deterministic(const IntensitySpec& spec) {
  if (const auto* c = std::get_if<CirIntensity>(&spec)) return c->vol == 0.0;
  return true;
}

std::vector<double> cumulate(std::span<const double> rate, double dt) {
  std::vector<double> cum(rate.size(), 0.0);
  for (std::size_t i = 1; i < rate.size(); ++i) cum[i] = cum[i - 1] + rate[i - 1] * dt;
  return cum;
}

RatePath simulate_rate(const IntensitySpec& spec, const TimeGrid& grid, std::mt19937_64& rng) {
  validate(spec);
  const std::size_t n = grid.steps();
  RatePath out{std::vector<double>(n + 1), std::vector<double>(n, 0.0)};
  if (const auto* c = std::get_if<ConstantIntensity>(&spec)) {
    std::fill(out.rate.begin(), out.rate.end(), c->level);
  } else if (const auto* p = std::get_if<PiecewiseIntensity>(&spec)) {
    for (std::size_t i = 0; i <= n; ++i) out.rate[i] = piecewise_level(*p, grid.time(i));
  } else {
    const auto& c = std::get<CirIntensity>(spec);
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = c.initial;
    out.rate[0] = x;
    for (std::size_t i = 0; i < n; ++i) {
      const double xp = std::max(x, 0.0);
      double eps = 0.0;
      if (c.vol > 0.0) eps = normal(rng);
      out.shock[i] = eps;
      x = x + c.speed * (c.level - xp) * dt + c.vol * std::sqrt(xp) * sqrt_dt * eps;
      out.rate[i + 1] = std::max(x, 0.0);
    }
  }
  return out;
}

IntensityPath simulate_intensity(const IntensityModel& model, const TimeGrid& grid,
                                 std::mt19937_64& rng) {
  RatePath b = simulate_rate(model.brownian, grid, rng);
  RatePath h = simulate_rate(model.jump, grid, rng);
  IntensityPath path;
  path.cum_B = cumulate(b.rate, grid.dt());
  path.cum_H = cumulate(h.rate, grid.dt());
  path.lambda_B = std::move(b.rate);
  path.lambda_H = std::move(h.rate);
  path.shock_B = std::move(b.shock);
  path.shock_H = std::move(h.shock);
  return path;
}

double lambda_measure(const IntensityPath& path, std::span<const std::size_t> cells,
                      std::span<const double> marks, const JumpMeasure& nu, double dt) {
  bool brownian = false;
  std::vector<bool> picked(nu.size(), false);
  for (double z : marks) {
    if (z == 0.0) {
      brownian = true;
      continue;
    }
    const auto j = nu.index_of(z);
    if (!j) throw SpecError("mark " + std::to_string(z) + " is not on the mark grid");
    picked[*j] = true;
  }
  double jump_mass = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (picked[j]) jump_mass += nu.weight(j);
  }
  std::vector<std::size_t> unique(cells.begin(), cells.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  double total = 0.0;
  for (std::size_t i : unique) {
    if (i >= path.steps()) throw std::out_of_range("cell index outside the grid");
    if (brownian) total += path.lambda_B[i] * dt;
    total += jump_mass * path.lambda_H[i] * dt;
  }
  return total;
}

}  // namespace tchedge
