#pragma once

#include <cstdint>
#include <random>

namespace dscp {

/**
 * Seeded draws over mt19937_64 with hand-rolled transforms (53-bit uniform,
 * Box-Muller normal, modular index), so streams are identical across
 * standard libraries.
 */
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform();                      // [0, 1)
    double normal();                       // standard normal
    std::uint64_t index(std::uint64_t n);  // uniform in [0, n)

    std::mt19937_64 gen;

  private:
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dscp
