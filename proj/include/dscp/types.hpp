#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dscp {

/** Base class for every error thrown by this library. */
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonMonotoneTime : Error { using Error::Error; };
struct RaggedFeatures : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct TooShort : Error { using Error::Error; };
struct SingularFit : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TooFewWindows : Error { using Error::Error; };
struct SingleCluster : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };
struct EmptySet : Error { using Error::Error; };
struct EmptyCluster : Error { using Error::Error; };
struct HorizonMismatch : Error { using Error::Error; };
struct Misaligned : Error { using Error::Error; };
struct Empty : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct InfeasiblePlan : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

/**
 * A univariate series on an evenly spaced clock, with optional per-step
 * feature columns. timestamps[i] is the clock value of step i; stride is the
 * (constant) spacing between consecutive steps.
 */
struct SeriesFrame {
    std::vector<std::int64_t> timestamps;
    std::int64_t stride = 1;
    Eigen::VectorXd target;
    Eigen::MatrixXd features;  // rows align with steps; 0x0 when absent

    Eigen::Index size() const { return target.size(); }
    bool has_features() const { return features.size() > 0; }
};

/** Point forecast over steps anchor+1 .. anchor+values.size(). */
struct ForecastWindow {
    std::int64_t anchor = 0;  // index of the last observed step
    Eigen::VectorXd values;   // values[j-1] forecasts step anchor+j
};

/** Signed forecast errors for one window: errors[j-1] = truth_j - forecast_j. */
struct ErrorRecord {
    ForecastWindow window;
    Eigen::VectorXd errors;
    int cluster = -1;  // assigned vertical class, -1 until classified
};

/** Per-step interval forecast aligned with a ForecastWindow. */
struct IntervalSeries {
    std::int64_t anchor = 0;
    double alpha = 0.1;
    Eigen::VectorXd lower;
    Eigen::VectorXd pred;
    Eigen::VectorXd upper;
    bool pooled_fallback = false;  // true when an empty class forced pooling

    Eigen::Index horizon() const { return pred.size(); }
};

/** One supervised pair: input spans anchor-a+1..anchor, truth spans anchor+1..anchor+b. */
struct SupervisedPair {
    std::int64_t anchor = 0;
    Eigen::VectorXd input;
    Eigen::VectorXd truth;
};

/**
 * Checks the SeriesFrame contract: strictly increasing timestamps with the
 * declared stride, finite values, feature rows aligned with steps, and at
 * least min_len steps. Throws NonMonotoneTime, RaggedFeatures, NonFinite or
 * TooShort.
 */
void validate_frame(const SeriesFrame& frame, Eigen::Index min_len = 1);

/**
 * Rolls the frame into all maximally overlapping supervised pairs with input
 * length a and horizon b (anchors advance by one step). Requires
 * frame.size() >= a + b; yields exactly size - a - b + 1 pairs.
 */
std::vector<SupervisedPair> make_supervised(const SeriesFrame& frame, int a, int b);

}  // namespace dscp
