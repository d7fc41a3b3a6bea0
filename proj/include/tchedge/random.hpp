#pragma once

#include <cstdint>
#include <random>

namespace tchedge {

enum class Stream : std::uint32_t {
  intensity = 1,
  noise = 2,
  probe = 3,
};

// Independent generator for Monte Carlo path `index`. Paths are pure
// functions of (seed, index, stream), so any subset can be regenerated.
std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t index, Stream stream);

}  // namespace tchedge
