#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dscp/predictors.hpp"
#include "dscp/rng.hpp"

#include <cmath>
#include <cstring>

namespace {

dscp::SeriesFrame frame_from(const Eigen::VectorXd& y) {
    dscp::SeriesFrame frame;
    frame.stride = 1;
    frame.target = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) frame.timestamps.push_back(i);
    return frame;
}

dscp::PredictorSpec seasonal(int period) {
    dscp::PredictorSpec spec;
    spec.kind = dscp::PredictorKind::seasonal_naive;
    spec.period = period;
    return spec;
}

dscp::PredictorSpec ar(int order, double ridge) {
    dscp::PredictorSpec spec;
    spec.kind = dscp::PredictorKind::linear_ar;
    spec.order = order;
    spec.ridge = ridge;
    return spec;
}

}  // namespace

TEST_CASE("seasonal_naive replays an exact periodic pattern") {
    Eigen::VectorXd y(8);
    y << 1, 2, 3, 4, 1, 2, 3, 4;
    const auto pred = dscp::fit(seasonal(4), frame_from(y), 4, 4);
    Eigen::VectorXd input(4);
    input << 1, 2, 3, 4;
    const auto window = dscp::predict(pred, input, 7);
    REQUIRE(window.values.size() == 4);
    CHECK(window.values[0] == 1.0);
    CHECK(window.values[1] == 2.0);
    CHECK(window.values[2] == 3.0);
    CHECK(window.values[3] == 4.0);
    CHECK(window.anchor == 7);
}

TEST_CASE("seasonal_naive period-2 replay wraps within the horizon") {
    Eigen::VectorXd y(8);
    y << 7, 9, 7, 9, 7, 9, 7, 9;
    const auto pred = dscp::fit(seasonal(2), frame_from(y), 2, 3);
    Eigen::VectorXd input(2);
    input << 7, 9;
    const auto window = dscp::predict(pred, input, 7);
    CHECK(window.values[0] == 7.0);
    CHECK(window.values[1] == 9.0);
    CHECK(window.values[2] == 7.0);
}

TEST_CASE("seasonal_naive is translation equivariant") {
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = std::sin(i * 0.9);
    const auto pred = dscp::fit(seasonal(3), frame_from(y), 6, 4);
    dscp::Rng rng(5);
    Eigen::VectorXd input(6);
    for (int i = 0; i < 6; ++i) input[i] = rng.normal();
    const double c = 17.5;
    const auto base = dscp::predict(pred, input, 0);
    const auto shifted = dscp::predict(pred, Eigen::VectorXd(input.array() + c), 0);
    for (int j = 0; j < 4; ++j) CHECK(shifted.values[j] == doctest::Approx(base.values[j] + c).epsilon(1e-12));
}

TEST_CASE("seasonal_naive fit rejects insufficient data") {
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 5;
    CHECK_THROWS_AS(dscp::fit(seasonal(4), frame_from(y), 4, 2), dscp::TooShort);  // len < p + b
    Eigen::VectorXd longer(12);
    longer.setLinSpaced(12, 0, 11);
    CHECK_THROWS_AS(dscp::fit(seasonal(4), frame_from(longer), 3, 2), dscp::TooShort);  // a < p
}

TEST_CASE("linear_ar recovers the AR(1) coefficient from noiseless data") {
    const int len = 20;
    Eigen::VectorXd y(len);
    y[0] = 100.0;
    for (int t = 1; t < len; ++t) y[t] = 0.5 * y[t - 1];
    const auto pred = dscp::fit(ar(1, 0.0), frame_from(y), 4, 3);
    REQUIRE(pred.coef.size() == 2);
    CHECK(std::abs(pred.coef[0]) < 1e-9);
    CHECK(pred.coef[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("linear_ar rollout follows the fitted recursion") {
    dscp::Predictor pred;
    pred.spec = ar(1, 0.0);
    pred.input_len = 1;
    pred.horizon = 2;
    pred.coef.resize(2);
    pred.coef << 0.0, 0.5;
    Eigen::VectorXd input(1);
    input << 8.0;
    const auto window = dscp::predict(pred, input, 0);
    CHECK(window.values[0] == doctest::Approx(4.0));
    CHECK(window.values[1] == doctest::Approx(2.0));
}

TEST_CASE("linear_ar predictions match the analytic recursion") {
    const int len = 24;
    Eigen::VectorXd y(len);
    y[0] = 100.0;
    for (int t = 1; t < len; ++t) y[t] = 0.5 * y[t - 1];
    const auto pred = dscp::fit(ar(1, 0.0), frame_from(y), 4, 5);
    Eigen::VectorXd input = y.tail(4);
    const auto window = dscp::predict(pred, input, len - 1);
    double expect = y[len - 1];
    for (int j = 0; j < 5; ++j) {
        expect *= 0.5;
        CHECK(window.values[j] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("linear_ar order-2 fit is exact on a noiseless AR(2)") {
    const int len = 60;
    Eigen::VectorXd y(len);
    y[0] = 1.0;
    y[1] = 0.5;
    for (int t = 2; t < len; ++t) y[t] = 1.2 * y[t - 1] - 0.5 * y[t - 2];
    const auto pred = dscp::fit(ar(2, 0.0), frame_from(y), 6, 4);
    REQUIRE(pred.coef.size() == 3);
    CHECK(pred.coef[1] == doctest::Approx(1.2).epsilon(1e-7));
    CHECK(pred.coef[2] == doctest::Approx(-0.5).epsilon(1e-7));
}

TEST_CASE("linear_ar reports singular fits instead of regularizing") {
    Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 5.0);
    CHECK_THROWS_AS(dscp::fit(ar(2, 0.0), frame_from(y), 4, 3), dscp::SingularFit);
    // The default ridge keeps the same data fittable.
    CHECK_NOTHROW(dscp::fit(ar(2, 1e-6), frame_from(y), 4, 3));
}

TEST_CASE("linear_ar fit rejects too-short training data") {
    Eigen::VectorXd y(6);
    y << 1, 2, 1, 2, 1, 2;
    CHECK_THROWS_AS(dscp::fit(ar(2, 0.0), frame_from(y), 4, 4), dscp::TooShort);
}

TEST_CASE("predict rejects inputs of the wrong length") {
    Eigen::VectorXd y(12);
    y.setLinSpaced(12, 0, 11);
    const auto pred = dscp::fit(seasonal(3), frame_from(y), 6, 2);
    Eigen::VectorXd bad(4);
    bad.setZero();
    CHECK_THROWS_AS(dscp::predict(pred, bad, 0), dscp::ShapeMismatch);
}

TEST_CASE("fits and forecasts are bit-identical across repeated runs") {
    dscp::Rng rng(77);
    Eigen::VectorXd y(120);
    for (int t = 0; t < 120; ++t) y[t] = std::sin(t * 0.26) * 5.0 + rng.normal();
    const auto frame = frame_from(y);
    const auto p1 = dscp::fit(ar(3, 1e-6), frame, 6, 4);
    const auto p2 = dscp::fit(ar(3, 1e-6), frame, 6, 4);
    REQUIRE(p1.coef.size() == p2.coef.size());
    CHECK(std::memcmp(p1.coef.data(), p2.coef.data(), sizeof(double) * p1.coef.size()) == 0);
    Eigen::VectorXd input = y.tail(6);
    const auto w1 = dscp::predict(p1, input, 119);
    const auto w2 = dscp::predict(p2, input, 119);
    CHECK(std::memcmp(w1.values.data(), w2.values.data(), sizeof(double) * 4) == 0);
}

TEST_CASE("feature columns do not influence lag-only predictors") {
    Eigen::VectorXd y(40);
    for (int t = 0; t < 40; ++t) y[t] = std::cos(t * 0.4) * 3.0 + 0.01 * t;
    auto plain = frame_from(y);
    auto with_features = plain;
    with_features.features = Eigen::MatrixXd::Random(40, 2);
    const auto p1 = dscp::fit(ar(2, 1e-6), plain, 5, 3);
    const auto p2 = dscp::fit(ar(2, 1e-6), with_features, 5, 3);
    CHECK(std::memcmp(p1.coef.data(), p2.coef.data(), sizeof(double) * p1.coef.size()) == 0);
}
