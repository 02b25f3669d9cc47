#include "dscp/rng.hpp"

#include <cmath>

namespace dscp {

double Rng::uniform() {
    // Top 53 bits give a dyadic rational in [0, 1), identically everywhere.
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::index(std::uint64_t n) {
    if (n <= 1) return 0;
    // Rejection sampling on the top bits keeps the draw exactly uniform.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = gen();
    while (x >= limit) x = gen();
    return x % n;
}

}  // namespace dscp
