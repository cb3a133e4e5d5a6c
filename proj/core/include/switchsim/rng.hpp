#pragma once

#include <cassert>
#include <cstdint>
#include <limits>
#include <random>

namespace switchsim {

// Deterministic random stream. All sampling goes through the helpers below so
// that a run replays bit-identically from its seed, independent of standard
// library distribution internals.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform index in {0, ..., n-1}, unbiased (rejection sampling).
    std::size_t uniform_index(std::size_t n) {
        assert(n > 0);
        if (n == 1) return 0;
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit =
            std::numeric_limits<std::uint64_t>::max() -
            std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::size_t>(v % bound);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace switchsim
