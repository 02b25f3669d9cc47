#pragma once

#include "dscp/types.hpp"

#include <cstdint>

namespace dscp {

enum class PredictorKind { seasonal_naive, linear_ar };

/**
 * Point forecaster configuration. Both kinds consume lagged targets only;
 * feature columns in a SeriesFrame are ignored here.
 */
struct PredictorSpec {
    PredictorKind kind = PredictorKind::seasonal_naive;
    int period = 1;        // seasonal_naive: season length p
    int order = 1;         // linear_ar: lag count q
    double ridge = 1e-6;   // linear_ar: L2 penalty; 0 demands a full-rank fit
};

/** A fitted forecaster; value-semantic, fully determined by (spec, train). */
struct Predictor {
    PredictorSpec spec;
    int input_len = 0;       // a, fixed at fit time
    int horizon = 0;         // b, fixed at fit time
    Eigen::VectorXd coef;    // linear_ar: [intercept, phi_1..phi_q]
};

/**
 * Fits spec on the training series. seasonal_naive needs train length >= p+b
 * and a >= p; linear_ar needs len-q >= q+b+1 regression rows and a >= q.
 * linear_ar solves ridge least squares on lagged targets; with ridge == 0 a
 * rank-deficient design throws SingularFit instead of being regularized.
 */
Predictor fit(const PredictorSpec& spec, const SeriesFrame& train, int a, int b);

/**
 * Forecasts the b steps after anchor from an input block of exactly a trailing
 * observations (input[a-1] is the anchor step's value). linear_ar rolls
 * forward recursively, feeding predictions back in as lags.
 */
ForecastWindow predict(const Predictor& pred, const Eigen::VectorXd& input, std::int64_t anchor);

}  // namespace dscp
