#include "dscp/error_sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dscp {

KsResult ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptySample("ks_two_sample needs two nonempty samples");
    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    // Walk the pooled points; after consuming every copy of a value, both
    // ECDFs are evaluated exactly at it, so ties are handled by construction.
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() || j < sb.size()) {
        double v;
        if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) v = sa[i];
        else v = sb[j];
        while (i < sa.size() && sa[i] == v) ++i;
        while (j < sb.size() && sb[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }

    KsResult res;
    res.d = d;
    const double lambda = d * std::sqrt(na * nb / (na + nb));
    if (lambda < 1e-6) {
        res.p = 1.0;
        return res;
    }
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        p += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    res.p = std::clamp(2.0 * p, 0.0, 1.0);
    return res;
}

ErrorRecord signed_errors(const Eigen::VectorXd& truth, const ForecastWindow& window) {
    if (truth.size() != window.values.size()) {
        throw ShapeMismatch("truth has " + std::to_string(truth.size()) + " steps, forecast has " +
                            std::to_string(window.values.size()));
    }
    if (truth.size() == 0) throw ShapeMismatch("empty window");
    ErrorRecord rec;
    rec.window = window;
    rec.errors = truth - window.values;
    return rec;
}

StepErrorSets build_step_sets(const std::vector<ErrorRecord>& records) {
    if (records.empty()) throw EmptyCluster("no error records");
    const Eigen::Index b = records.front().errors.size();
    StepErrorSets sets;
    sets.per_step.assign(static_cast<std::size_t>(b), {});
    for (auto& s : sets.per_step) s.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.errors.size() != b) {
            throw HorizonMismatch("record horizon " + std::to_string(rec.errors.size()) +
                                  " does not match " + std::to_string(b));
        }
        for (Eigen::Index j = 0; j < b; ++j) sets.per_step[static_cast<std::size_t>(j)].push_back(rec.errors[j]);
    }
    return sets;
}

int MergedErrorSets::range_of_step(int j) const {
    for (std::size_t r = 0; r < ranges.size(); ++r) {
        if (j >= ranges[r].first && j <= ranges[r].second) return static_cast<int>(r);
    }
    throw ShapeMismatch("step " + std::to_string(j) + " outside merged horizon");
}

const std::vector<double>& MergedErrorSets::step_set(int j) const {
    return range_sets[static_cast<std::size_t>(range_of_step(j))];
}

MergedErrorSets adaptive_merge(double theta, const StepErrorSets& sets) {
    if (!(theta > 0.0 && theta <= 1.0)) throw InvalidSpec("theta must lie in (0, 1]");
    const int b = sets.horizon();
    if (b == 0) throw EmptySet("no step sets to merge");

    MergedErrorSets merged;
    std::vector<double> current = sets.per_step[0];
    std::sort(current.begin(), current.end());
    int start = 1;
    for (int j = 2; j <= b; ++j) {
        const auto& next = sets.per_step[static_cast<std::size_t>(j - 1)];
        if (ks_two_sample(current, next).p > theta) {
            // Absorb: the growing pooled set is what the next step is tested against.
            std::vector<double> widened;
            widened.reserve(current.size() + next.size());
            std::vector<double> ns = next;
            std::sort(ns.begin(), ns.end());
            std::merge(current.begin(), current.end(), ns.begin(), ns.end(), std::back_inserter(widened));
            current = std::move(widened);
        } else {
            merged.ranges.emplace_back(start, j - 1);
            merged.range_sets.push_back(std::move(current));
            current = next;
            std::sort(current.begin(), current.end());
            start = j;
        }
    }
    merged.ranges.emplace_back(start, b);
    merged.range_sets.push_back(std::move(current));
    return merged;
}

}  // namespace dscp
