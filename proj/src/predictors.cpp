#include "dscp/predictors.hpp"

#include <Eigen/QR>

#include <string>

namespace dscp {

namespace {

Predictor fit_seasonal_naive(const PredictorSpec& spec, const SeriesFrame& train, int a, int b) {
    const int p = spec.period;
    if (p < 1) throw InvalidSpec("seasonal period must be positive");
    if (train.size() < p + b) {
        throw TooShort("seasonal_naive needs at least p+b = " + std::to_string(p + b) + " steps");
    }
    if (a < p) {
        throw TooShort("input length a=" + std::to_string(a) + " cannot replay period " +
                       std::to_string(p));
    }
    Predictor pred;
    pred.spec = spec;
    pred.input_len = a;
    pred.horizon = b;
    return pred;
}

Predictor fit_linear_ar(const PredictorSpec& spec, const SeriesFrame& train, int a, int b) {
    const int q = spec.order;
    if (q < 1) throw InvalidSpec("AR order must be positive");
    if (spec.ridge < 0.0) throw InvalidSpec("ridge penalty must be nonnegative");
    if (a < q) {
        throw TooShort("input length a=" + std::to_string(a) + " is shorter than AR order " +
                       std::to_string(q));
    }
    const Eigen::Index rows = train.size() - q;
    if (rows < q + b + 1) {
        throw TooShort("linear_ar q=" + std::to_string(q) + " needs at least " +
                       std::to_string(2 * q + b + 1) + " steps");
    }

    Eigen::MatrixXd X(rows, q + 1);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = r + q;
        X(r, 0) = 1.0;
        for (int lag = 1; lag <= q; ++lag) X(r, lag) = train.target[t - lag];
        y[r] = train.target[t];
    }

    Predictor pred;
    pred.spec = spec;
    pred.input_len = a;
    pred.horizon = b;
    if (spec.ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < q + 1) {
            throw SingularFit("rank-deficient design at ridge=0; raise the penalty or the data's variety");
        }
        pred.coef = qr.solve(y);
    } else {
        const Eigen::MatrixXd gram =
            X.transpose() * X + spec.ridge * Eigen::MatrixXd::Identity(q + 1, q + 1);
        pred.coef = gram.ldlt().solve(X.transpose() * y);
    }
    return pred;
}

}  // namespace

Predictor fit(const PredictorSpec& spec, const SeriesFrame& train, int a, int b) {
    if (a < 1 || b < 1) throw InvalidSpec("a and b must be positive");
    validate_frame(train);
    switch (spec.kind) {
        case PredictorKind::seasonal_naive:
            return fit_seasonal_naive(spec, train, a, b);
        case PredictorKind::linear_ar:
            return fit_linear_ar(spec, train, a, b);
    }
    throw InvalidSpec("unknown predictor kind");
}

ForecastWindow predict(const Predictor& pred, const Eigen::VectorXd& input, std::int64_t anchor) {
    if (input.size() != pred.input_len) {
        throw ShapeMismatch("input has " + std::to_string(input.size()) + " steps, predictor wants " +
                            std::to_string(pred.input_len));
    }
    ForecastWindow out;
    out.anchor = anchor;
    out.values.resize(pred.horizon);

    if (pred.spec.kind == PredictorKind::seasonal_naive) {
        const int p = pred.spec.period;
        for (int h = 1; h <= pred.horizon; ++h) {
            // Step anchor+h echoes the observation p*ceil(h/p) steps back, which
            // lands within the last period of the input because a >= p.
            const int offset = h - p * ((h + p - 1) / p);  // in (-p, 0]
            out.values[h - 1] = input[pred.input_len - 1 + offset];
        }
        return out;
    }

    // linear_ar: recursive rollout, predictions feed back in as lags.
    const int q = pred.spec.order;
    std::vector<double> hist(static_cast<std::size_t>(q));
    for (int lag = 0; lag < q; ++lag) hist[static_cast<std::size_t>(lag)] = input[input.size() - 1 - lag];
    for (int h = 0; h < pred.horizon; ++h) {
        double v = pred.coef[0];
        for (int lag = 1; lag <= q; ++lag) v += pred.coef[lag] * hist[static_cast<std::size_t>(lag - 1)];
        out.values[h] = v;
        for (int lag = q - 1; lag > 0; --lag) hist[static_cast<std::size_t>(lag)] = hist[static_cast<std::size_t>(lag - 1)];
        if (q > 0) hist[0] = v;
    }
    return out;
}

}  // namespace dscp
