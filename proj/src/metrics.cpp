#include "dscp/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>

namespace dscp {

namespace {

void check_aligned(const std::vector<IntervalSeries>& intervals,
                   const std::vector<Eigen::VectorXd>& truths) {
    if (intervals.size() != truths.size()) {
        throw Misaligned("have " + std::to_string(intervals.size()) + " interval series but " +
                         std::to_string(truths.size()) + " truth vectors");
    }
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].horizon() != truths[i].size()) {
            throw Misaligned("window " + std::to_string(i) + ": horizon " +
                             std::to_string(intervals[i].horizon()) + " vs truth length " +
                             std::to_string(truths[i].size()));
        }
    }
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double delta_cov(const std::vector<IntervalSeries>& intervals,
                 const std::vector<Eigen::VectorXd>& truths, double alpha) {
    check_aligned(intervals, truths);
    if (intervals.empty()) throw Misaligned("no intervals to score");
    std::size_t covered = 0, total = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        for (Eigen::Index j = 0; j < iv.horizon(); ++j) {
            covered += (truths[i][j] >= iv.lower[j] && truths[i][j] <= iv.upper[j]) ? 1 : 0;
            ++total;
        }
    }
    const double coverage = static_cast<double>(covered) / static_cast<double>(total);
    return 100.0 * (coverage - (1.0 - alpha));
}

double pi_width(const std::vector<IntervalSeries>& intervals) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& iv : intervals) {
        total += (iv.upper - iv.lower).sum();
        n += static_cast<std::size_t>(iv.horizon());
    }
    if (n == 0) throw Empty("no intervals to average");
    return total / static_cast<double>(n);
}

double winkler(const std::vector<IntervalSeries>& intervals,
               const std::vector<Eigen::VectorXd>& truths, double alpha) {
    check_aligned(intervals, truths);
    if (intervals.empty()) throw Misaligned("no intervals to score");
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        for (Eigen::Index j = 0; j < iv.horizon(); ++j) {
            const double width = iv.upper[j] - iv.lower[j];
            const double y = truths[i][j];
            double score = width;
            if (y < iv.lower[j]) score += (2.0 / alpha) * (iv.lower[j] - y);
            if (y > iv.upper[j]) score += (2.0 / alpha) * (y - iv.upper[j]);
            total += score;
            ++n;
        }
    }
    return total / static_cast<double>(n);
}

EvalReport evaluate(const std::string& method, const std::vector<IntervalSeries>& intervals,
                    const std::vector<Eigen::VectorXd>& truths, double alpha) {
    EvalReport report;
    report.method = method;
    report.alpha = alpha;
    report.delta_cov = delta_cov(intervals, truths, alpha);
    report.pi_width = pi_width(intervals);
    report.winkler = winkler(intervals, truths, alpha);
    report.n_windows = intervals.size();
    report.n_points = 0;
    for (const auto& iv : intervals) report.n_points += static_cast<std::size_t>(iv.horizon());
    return report;
}

std::string report_csv_header() { return "method,alpha,delta_cov,pi_width,winkler,n_windows,n_points"; }

std::string report_csv_row(const EvalReport& r) {
    std::ostringstream out;
    out << r.method << ',' << fmt(r.alpha) << ',' << fmt(r.delta_cov) << ',' << fmt(r.pi_width) << ','
        << fmt(r.winkler) << ',' << r.n_windows << ',' << r.n_points;
    return out.str();
}

std::string report_json(const std::vector<EvalReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back({{"method", r.method},
                       {"alpha", r.alpha},
                       {"delta_cov", r.delta_cov},
                       {"pi_width", r.pi_width},
                       {"winkler", r.winkler},
                       {"n_windows", r.n_windows},
                       {"n_points", r.n_points}});
    }
    return arr.dump(2);
}

}  // namespace dscp
