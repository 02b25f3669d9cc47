#pragma once

#include "dscp/rng.hpp"
#include "dscp/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dscp {

enum class ScenarioKind { periodic_heteroscedastic, two_regime, variance_shift, exchangeable_ar1 };

/**
 * Synthetic scenario description. Fields are read per kind:
 *  - periodic_heteroscedastic: period, amplitude, sigma_high (first half of
 *    each period, the "day"), sigma_low (second half).
 *  - two_regime: period, block (steps per regime block), amp_high/amp_low,
 *    sigma_high/sigma_low scaled by the regime's relative amplitude, so the
 *    loud regime also has the loud errors.
 *  - variance_shift: amplitude (constant level), sigma_low before
 *    shift_point, sigma_high after (shift_point < 0 means length/2).
 *  - exchangeable_ar1: phi, sigma innovations, zero mean.
 */
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::exchangeable_ar1;
    int length = 512;
    std::uint64_t seed = 0;

    int period = 24;
    double amplitude = 10.0;
    double sigma_high = 2.0;
    double sigma_low = 0.25;
    double amp_high = 10.0;
    double amp_low = 1.0;
    int block = 96;
    int shift_point = -1;
    double phi = 0.5;
    double sigma = 1.0;
};

/** Generated frame plus the ground truth that produced it. */
struct SynthResult {
    SeriesFrame frame;
    Eigen::VectorXd signal;       // noiseless component
    Eigen::VectorXd noise_sigma;  // per-step noise scale actually used
    std::vector<int> regime;      // per-step regime label
};

/**
 * Deterministic for a fixed spec: same (kind, params, seed) reproduces the
 * series bit for bit. Requires length >= 64 and positive noise scales;
 * throws InvalidSpec otherwise.
 */
SynthResult generate(const ScenarioSpec& spec);

ScenarioKind scenario_kind_from_name(const std::string& name);
const char* scenario_kind_name(ScenarioKind kind);

}  // namespace dscp
