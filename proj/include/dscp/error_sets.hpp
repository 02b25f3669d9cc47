#pragma once

#include "dscp/types.hpp"

#include <utility>
#include <vector>

namespace dscp {

/** Two-sample Kolmogorov-Smirnov result. */
struct KsResult {
    double d = 0.0;  // sup-distance between the two empirical CDFs
    double p = 1.0;  // asymptotic two-sided p-value
};

/**
 * Exact KS statistic (both ECDFs evaluated at every pooled point, ties
 * handled) with the asymptotic Kolmogorov p-value
 *   p = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2),
 *   lambda = d * sqrt(na*nb/(na+nb)),
 * truncated once a term drops below 1e-12 and clamped to [0, 1].
 * Throws EmptySample if either sample is empty.
 */
KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

/** Column-major view of signed errors: per_step[j-1] holds every record's step-j error. */
struct StepErrorSets {
    std::vector<std::vector<double>> per_step;

    int horizon() const { return static_cast<int>(per_step.size()); }
};

/** signed errors truth - forecast; throws ShapeMismatch on length disagreement. */
ErrorRecord signed_errors(const Eigen::VectorXd& truth, const ForecastWindow& window);

/** Transposes records into per-step sets. Throws EmptyCluster on no records, HorizonMismatch on ragged horizons. */
StepErrorSets build_step_sets(const std::vector<ErrorRecord>& records);

/**
 * Result of the horizontal classification: contiguous step ranges (1-based,
 * inclusive) that share one pooled error multiset each.
 */
struct MergedErrorSets {
    std::vector<std::pair<int, int>> ranges;
    std::vector<std::vector<double>> range_sets;  // aligned with ranges

    int horizon() const { return ranges.empty() ? 0 : ranges.back().second; }
    int range_of_step(int j) const;                    // 1-based step -> range index
    const std::vector<double>& step_set(int j) const;  // pooled set covering step j
};

/**
 * Left-to-right KS merge sweep: the pooled set of the current range is tested
 * against the next step's set; p > theta absorbs the step, otherwise a new
 * range starts there. Every step ends up covered, the final one included.
 * theta must lie in (0, 1]. Throws InvalidSpec on a bad theta, EmptySet on
 * empty input.
 */
MergedErrorSets adaptive_merge(double theta, const StepErrorSets& sets);

}  // namespace dscp
