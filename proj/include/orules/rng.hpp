#ifndef ORULES_RNG_HPP
#define ORULES_RNG_HPP

#include <cstdint>
#include <random>

namespace orules {

/// Seeded uniform stream with a draw counter. Trajectories consume a fixed
/// number of draws per step, so identical (scenario, seed) pairs replay
/// bit-identically regardless of how runs are scheduled across workers.
class CountedRng {
  public:
    explicit CountedRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        ++count_;
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    std::uint64_t draw_count() const { return count_; }

  private:
    std::mt19937_64 gen_;
    std::uint64_t count_ = 0;
};

}  // namespace orules

#endif
