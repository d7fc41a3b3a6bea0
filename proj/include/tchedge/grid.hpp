#pragma once

#include <cstddef>
#include <vector>

namespace tchedge {

// Uniform grid t_i = i * T / N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps);

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  std::size_t nodes() const { return steps_ + 1; }
  double dt() const { return dt_; }

  // t_N is returned as the horizon itself, not N * dt.
  double time(std::size_t node) const;
  std::vector<double> times() const;

  // Index of the node at time t; throws if t is not a node.
  std::size_t node_at(double t) const;

  bool operator==(const TimeGrid& other) const = default;

 private:
  double horizon_;
  std::size_t steps_;
  double dt_;
};

}  // namespace tchedge
