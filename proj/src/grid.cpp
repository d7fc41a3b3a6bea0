#include "tchedge/grid.hpp"

#include <cmath>
#include <string>

#include "tchedge/error.hpp"

namespace tchedge {

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon_(horizon),
      steps_(steps),
      dt_(steps > 0 ? horizon / static_cast<double>(steps) : 0.0) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw SpecError("time grid horizon must be positive and finite");
  }
  if (steps == 0) throw SpecError("time grid needs at least one step");
}

double TimeGrid::time(std::size_t node) const {
  if (node >= steps_) return horizon_;
  return static_cast<double>(node) * dt_;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
  return out;
}

std::size_t TimeGrid::node_at(double t) const {
  const double scaled = t / dt_;
  const double rounded = std::round(scaled);
  if (rounded < 0.0 || rounded > static_cast<double>(steps_) || std::abs(scaled - rounded) > 1e-9) {
    throw std::invalid_argument("time " + std::to_string(t) + " is not a grid node");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace tchedge
