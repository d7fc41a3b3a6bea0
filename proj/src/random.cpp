#include "tchedge/random.hpp"

namespace tchedge {

std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t index, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace tchedge
