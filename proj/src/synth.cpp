#include "dscp/synth.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace dscp {

namespace {

constexpr double kTau = 6.283185307179586;

void check_spec(const ScenarioSpec& spec) {
    if (spec.length < 64) throw InvalidSpec("scenario length must be at least 64");
    if (spec.period < 2) throw InvalidSpec("period must be at least 2");
    if (!(spec.sigma_high > 0.0) || !(spec.sigma_low > 0.0) || !(spec.sigma > 0.0)) {
        throw InvalidSpec("noise scales must be positive");
    }
    if (spec.block < 1) throw InvalidSpec("block length must be positive");
    if (!(std::abs(spec.phi) < 1.0)) throw InvalidSpec("|phi| must be below 1 for stationarity");
}

SynthResult shell(int length) {
    SynthResult out;
    out.frame.stride = 1;
    out.frame.timestamps.resize(static_cast<std::size_t>(length));
    std::iota(out.frame.timestamps.begin(), out.frame.timestamps.end(), 0);
    out.frame.target.resize(length);
    out.signal.resize(length);
    out.noise_sigma.resize(length);
    out.regime.assign(static_cast<std::size_t>(length), 0);
    return out;
}

}  // namespace

SynthResult generate(const ScenarioSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);
    SynthResult out = shell(spec.length);

    switch (spec.kind) {
        case ScenarioKind::periodic_heteroscedastic: {
            // Solar-like hump with loud daytime noise and near-silent nights.
            const int half = spec.period / 2;
            for (int t = 0; t < spec.length; ++t) {
                const int phase = t % spec.period;
                const double s = spec.amplitude * std::max(0.0, std::sin(kTau * phase / spec.period));
                const bool day = phase < half;
                const double sd = day ? spec.sigma_high : spec.sigma_low;
                out.signal[t] = s;
                out.noise_sigma[t] = sd;
                out.regime[static_cast<std::size_t>(t)] = day ? 1 : 0;
                out.frame.target[t] = s + sd * rng.normal();
            }
            break;
        }
        case ScenarioKind::two_regime: {
            // Alternating blocks of loud and quiet days; noise scales with the
            // block's amplitude so the loud regime also has the loud errors.
            const double amp_ref = std::max(spec.amp_high, spec.amp_low);
            for (int t = 0; t < spec.length; ++t) {
                const int blk = t / spec.block;
                const bool high = blk % 2 == 0;
                const double amp = high ? spec.amp_high : spec.amp_low;
                const double scale = amp_ref > 0.0 ? amp / amp_ref : 1.0;
                const int phase = t % spec.period;
                const double s = amp * (0.55 + 0.45 * std::sin(kTau * phase / spec.period));
                const double sd = scale * (phase < spec.period / 2 ? spec.sigma_high : spec.sigma_low);
                out.signal[t] = s;
                out.noise_sigma[t] = sd;
                out.regime[static_cast<std::size_t>(t)] = high ? 1 : 0;
                out.frame.target[t] = s + sd * rng.normal();
            }
            break;
        }
        case ScenarioKind::variance_shift: {
            const int shift = spec.shift_point >= 0 ? spec.shift_point : spec.length / 2;
            for (int t = 0; t < spec.length; ++t) {
                const bool after = t >= shift;
                const double sd = after ? spec.sigma_high : spec.sigma_low;
                out.signal[t] = spec.amplitude;
                out.noise_sigma[t] = sd;
                out.regime[static_cast<std::size_t>(t)] = after ? 1 : 0;
                out.frame.target[t] = spec.amplitude + sd * rng.normal();
            }
            break;
        }
        case ScenarioKind::exchangeable_ar1: {
            // Burn-in washes out the zero start so the series is stationary.
            double y = 0.0;
            for (int t = 0; t < 100; ++t) y = spec.phi * y + spec.sigma * rng.normal();
            for (int t = 0; t < spec.length; ++t) {
                y = spec.phi * y + spec.sigma * rng.normal();
                out.signal[t] = 0.0;
                out.noise_sigma[t] = spec.sigma;
                out.frame.target[t] = y;
            }
            break;
        }
    }
    return out;
}

ScenarioKind scenario_kind_from_name(const std::string& name) {
    if (name == "periodic_heteroscedastic") return ScenarioKind::periodic_heteroscedastic;
    if (name == "two_regime") return ScenarioKind::two_regime;
    if (name == "variance_shift") return ScenarioKind::variance_shift;
    if (name == "exchangeable_ar1") return ScenarioKind::exchangeable_ar1;
    throw InvalidSpec("unknown scenario kind '" + name + "'");
}

const char* scenario_kind_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::periodic_heteroscedastic: return "periodic_heteroscedastic";
        case ScenarioKind::two_regime: return "two_regime";
        case ScenarioKind::variance_shift: return "variance_shift";
        case ScenarioKind::exchangeable_ar1: return "exchangeable_ar1";
    }
    return "unknown";
}

}  // namespace dscp
