#include "dscp/types.hpp"

#include <cmath>
#include <string>

namespace dscp {

void validate_frame(const SeriesFrame& frame, Eigen::Index min_len) {
    const auto n = frame.target.size();
    if (n < min_len) {
        throw TooShort("series has " + std::to_string(n) + " steps, needs at least " +
                       std::to_string(min_len));
    }
    if (static_cast<Eigen::Index>(frame.timestamps.size()) != n) {
        throw RaggedFeatures("timestamp count " + std::to_string(frame.timestamps.size()) +
                             " does not match " + std::to_string(n) + " target steps");
    }
    if (frame.stride <= 0) {
        throw NonMonotoneTime("stride must be positive");
    }
    for (Eigen::Index i = 1; i < n; ++i) {
        const auto gap = frame.timestamps[i] - frame.timestamps[i - 1];
        if (gap <= 0) {
            throw NonMonotoneTime("timestamps not strictly increasing at step " + std::to_string(i));
        }
        if (gap != frame.stride) {
            throw NonMonotoneTime("uneven spacing at step " + std::to_string(i) + ": gap " +
                                  std::to_string(gap) + " vs stride " + std::to_string(frame.stride));
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(frame.target[i])) {
            throw NonFinite("non-finite target at step " + std::to_string(i));
        }
    }
    if (frame.has_features()) {
        if (frame.features.rows() != n) {
            throw RaggedFeatures("feature rows " + std::to_string(frame.features.rows()) +
                                 " do not match " + std::to_string(n) + " target steps");
        }
        if (!frame.features.allFinite()) {
            throw NonFinite("non-finite feature value");
        }
    }
}

std::vector<SupervisedPair> make_supervised(const SeriesFrame& frame, int a, int b) {
    if (a < 1 || b < 1) {
        throw TooShort("window lengths must be positive, got a=" + std::to_string(a) +
                       " b=" + std::to_string(b));
    }
    validate_frame(frame, static_cast<Eigen::Index>(a) + b);
    const Eigen::Index n = frame.target.size();
    std::vector<SupervisedPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n - a - b + 1));
    for (Eigen::Index t = a - 1; t + b < n; ++t) {
        SupervisedPair p;
        p.anchor = t;
        p.input = frame.target.segment(t - a + 1, a);
        p.truth = frame.target.segment(t + 1, b);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace dscp
