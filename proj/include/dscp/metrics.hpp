#pragma once

#include "dscp/types.hpp"

#include <string>
#include <vector>

namespace dscp {

/** Aggregate evaluation row for one (method, alpha) pair. */
struct EvalReport {
    std::string method;
    double alpha = 0.1;
    double delta_cov = 0.0;  // percentage points vs the nominal 1-alpha
    double pi_width = 0.0;   // mean upper-lower
    double winkler = 0.0;    // mean Winkler score
    std::size_t n_windows = 0;
    std::size_t n_points = 0;
};

/**
 * Pointwise coverage gap in percentage points over every (window, step):
 * 100 * (empirical coverage - (1 - alpha)). Bounds are inclusive. Throws
 * Misaligned on no intervals or on truth misalignment.
 */
double delta_cov(const std::vector<IntervalSeries>& intervals,
                 const std::vector<Eigen::VectorXd>& truths, double alpha);

/** Mean interval width over every (window, step). Throws Empty on no intervals. */
double pi_width(const std::vector<IntervalSeries>& intervals);

/**
 * Mean Winkler score: width plus 2/alpha times the violation distance for
 * points outside their interval.
 */
double winkler(const std::vector<IntervalSeries>& intervals,
               const std::vector<Eigen::VectorXd>& truths, double alpha);

/** Builds the full report row for one method's intervals. */
EvalReport evaluate(const std::string& method, const std::vector<IntervalSeries>& intervals,
                    const std::vector<Eigen::VectorXd>& truths, double alpha);

std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);
std::string report_json(const std::vector<EvalReport>& reports);

}  // namespace dscp
