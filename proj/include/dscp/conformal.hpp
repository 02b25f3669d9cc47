#pragma once

#include "dscp/clustering.hpp"
#include "dscp/error_sets.hpp"
#include "dscp/predictors.hpp"
#include "dscp/store.hpp"
#include "dscp/types.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

namespace dscp {

/**
 * Conservative order-statistic quantiles are the default everywhere; the
 * interpolated variant exists only for parity experiments behind an explicit
 * config flag.
 */
enum class QuantileMode { conservative, interpolated };

/**
 * Signed-error quantile pair for a two-sided 1-alpha interval. Conservative
 * mode returns order statistics with the (n+1) correction: the upper bound is
 * the ceil((n+1)(1-alpha/2))-th smallest (clamped to the max), the lower the
 * floor((n+1)(alpha/2))-th smallest (at least the 1st, i.e. the min).
 * Throws EmptySample on an empty multiset, InvalidSpec on alpha outside (0,1).
 */
std::pair<double, double> conformal_quantiles(const std::vector<double>& errors, double alpha,
                                              QuantileMode mode = QuantileMode::conservative);

/** Same contract, but the input is already sorted ascending (hot path). */
std::pair<double, double> conformal_quantiles_sorted(const std::vector<double>& errors, double alpha,
                                                     QuantileMode mode = QuantileMode::conservative);

/** ceil((n+1)(1-alpha))-th smallest of a sorted nonconformity pool, clamped to the max. */
double conservative_upper(const std::vector<double>& sorted_pool, double alpha,
                          QuantileMode mode = QuantileMode::conservative);

enum class Method { dscp, cp, enbpi_style, aci, per_step_cp };

/** Per-method run settings; method-specific knobs must be present exactly when required. */
struct MethodConfig {
    Method method = Method::dscp;
    double alpha = 0.1;
    std::optional<double> theta;      // dscp only
    std::optional<int> n_max;         // dscp only
    std::optional<double> gamma_aci;  // aci only

    /** Throws InvalidSpec on missing required or stray foreign parameters. */
    void validate() const;
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/**
 * Dual-splitting calibration from precomputed error records: self-clustered
 * vertical classes over the forecast windows, then a KS merge of the per-step
 * error sets inside each class. Classes the clusterer leaves hollow are
 * dropped, so every stored class holds at least one record. Throws
 * TooFewWindows on an empty record list, HorizonMismatch on ragged horizons.
 */
CalibrationStore dscp_calibrate_records(const std::vector<ErrorRecord>& records, const StoreConfig& cfg);

/** Convenience wrapper: builds the records by forecasting every calibration pair. */
CalibrationStore dscp_calibrate(const Predictor& pred, const SeriesFrame& calib, const StoreConfig& cfg,
                                int a, int b);

/**
 * Interval for a new forecast window: classify, then per step add that
 * cluster's merged-set quantiles to the point forecast. A cluster with no
 * records falls back to the pooled errors of the whole store and flags the
 * result. Throws HorizonMismatch when the window length differs from the
 * store's horizon.
 */
IntervalSeries dscp_predict(const CalibrationStore& store, const ForecastWindow& window, double alpha,
                            QuantileMode mode = QuantileMode::conservative);

/**
 * Returns a store extended with one observed window: errors recorded under
 * the assigned cluster, that cluster's step sets re-merged, s refreshed. The
 * input store is untouched.
 */
CalibrationStore dscp_update(const CalibrationStore& store, const ForecastWindow& window,
                             const Eigen::VectorXd& truth);

/** Split CP: symmetric interval from the pooled absolute errors of all records. */
IntervalSeries cp_interval(const std::vector<ErrorRecord>& records, const ForecastWindow& window,
                           double alpha, QuantileMode mode = QuantileMode::conservative);

/** Split CP from an already sorted absolute-error pool. */
IntervalSeries cp_interval_pool(const std::vector<double>& sorted_abs, const ForecastWindow& window,
                                double alpha, QuantileMode mode = QuantileMode::conservative);

/** Per-step CP: step j uses only step-j absolute errors across records. */
IntervalSeries per_step_cp_interval(const std::vector<ErrorRecord>& records, const ForecastWindow& window,
                                    double alpha, QuantileMode mode = QuantileMode::conservative);

/** FIFO pool of absolute errors for the EnbPI-style baseline. */
struct EnbpiState {
    std::deque<double> pool;
    std::size_t capacity = 512;

    /** Keeps the most recent `capacity` values of `abs_errors`. */
    static EnbpiState from_errors(const std::vector<double>& abs_errors, std::size_t capacity);
};

/** Symmetric interval from the current pool. Throws EmptySample on an empty pool. */
IntervalSeries enbpi_style_interval(const EnbpiState& state, const ForecastWindow& window, double alpha,
                                    QuantileMode mode = QuantileMode::conservative);

/**
 * Pushes the window's new absolute errors (truth vs interval midpoint, which
 * equals the point forecast for this symmetric baseline), evicting oldest
 * entries beyond capacity.
 */
void enbpi_style_update(EnbpiState& state, const Eigen::VectorXd& truth, const IntervalSeries& interval);

/**
 * One adaptive conformal step: alpha_t + gamma * (alpha_target - err) with
 * err = 0 for a covered outcome and 1 for a miss, clamped to
 * [1e-4, 1 - 1e-4].
 */
double aci_step(double alpha_t, double alpha_target, double gamma, bool covered);

}  // namespace dscp
