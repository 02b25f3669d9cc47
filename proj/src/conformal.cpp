#include "dscp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dscp {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidSpec("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

double interp_quantile(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<double> sorted_abs_pool(const std::vector<ErrorRecord>& records) {
    std::vector<double> pool;
    for (const auto& rec : records) {
        for (Eigen::Index j = 0; j < rec.errors.size(); ++j) pool.push_back(std::abs(rec.errors[j]));
    }
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

std::pair<double, double> conformal_quantiles_sorted(const std::vector<double>& errors, double alpha,
                                                     QuantileMode mode) {
    if (errors.empty()) throw EmptySet("empty error multiset");
    check_alpha(alpha);
    const std::size_t n = errors.size();
    if (mode == QuantileMode::interpolated) {
        return {interp_quantile(errors, alpha / 2.0), interp_quantile(errors, 1.0 - alpha / 2.0)};
    }
    const double np1 = static_cast<double>(n + 1);
    auto hi = static_cast<std::size_t>(std::ceil(np1 * (1.0 - alpha / 2.0)));
    auto lo = static_cast<std::size_t>(std::floor(np1 * (alpha / 2.0)));
    hi = std::min(hi, n);            // clamp to the maximum
    lo = std::max<std::size_t>(lo, 1);  // floor of 1, i.e. the minimum
    lo = std::min(lo, n);
    return {errors[lo - 1], errors[hi - 1]};
}

std::pair<double, double> conformal_quantiles(const std::vector<double>& errors, double alpha,
                                              QuantileMode mode) {
    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    return conformal_quantiles_sorted(sorted, alpha, mode);
}

double conservative_upper(const std::vector<double>& sorted_pool, double alpha, QuantileMode mode) {
    if (sorted_pool.empty()) throw EmptySet("empty nonconformity pool");
    check_alpha(alpha);
    if (mode == QuantileMode::interpolated) return interp_quantile(sorted_pool, 1.0 - alpha);
    const std::size_t n = sorted_pool.size();
    auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n + 1) * (1.0 - alpha)));
    k = std::min(k, n);
    return sorted_pool[k - 1];
}

const char* method_name(Method m) {
    switch (m) {
        case Method::dscp: return "dscp";
        case Method::cp: return "cp";
        case Method::enbpi_style: return "enbpi_style";
        case Method::aci: return "aci";
        case Method::per_step_cp: return "per_step_cp";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "dscp") return Method::dscp;
    if (name == "cp") return Method::cp;
    if (name == "enbpi_style" || name == "enbpi") return Method::enbpi_style;
    if (name == "aci") return Method::aci;
    if (name == "per_step_cp") return Method::per_step_cp;
    throw InvalidSpec("unknown method '" + name + "'");
}

void MethodConfig::validate() const {
    check_alpha(alpha);
    const bool is_dscp = method == Method::dscp;
    const bool is_aci = method == Method::aci;
    if (is_dscp) {
        if (!theta || !n_max) throw InvalidSpec("dscp requires theta and N_max");
        if (!(*theta > 0.0 && *theta <= 1.0)) throw InvalidSpec("theta must lie in (0, 1]");
        if (*n_max < 2) throw InvalidSpec("N_max must be at least 2");
    } else if (theta || n_max) {
        throw InvalidSpec(std::string("theta/N_max are dscp-only, got them on ") + method_name(method));
    }
    if (is_aci) {
        if (!gamma_aci) throw InvalidSpec("aci requires gamma_aci");
        if (!(*gamma_aci > 0.0)) throw InvalidSpec("gamma_aci must be positive");
    } else if (gamma_aci) {
        throw InvalidSpec(std::string("gamma_aci is aci-only, got it on ") + method_name(method));
    }
}

CalibrationStore dscp_calibrate_records(const std::vector<ErrorRecord>& records, const StoreConfig& cfg) {
    if (records.empty()) throw TooFewWindows("no calibration records");
    const Eigen::Index b = records.front().errors.size();
    for (const auto& rec : records) {
        if (rec.errors.size() != b || rec.window.values.size() != b) {
            throw HorizonMismatch("calibration records disagree on horizon");
        }
    }

    CalibrationStore store;
    store.horizon = static_cast<int>(b);
    store.config = cfg;

    std::vector<int> labels;
    int k = 1;
    std::vector<Eigen::VectorXd> centroids;
    if (records.size() >= 2) {
        std::vector<Eigen::VectorXd> windows;
        windows.reserve(records.size());
        for (const auto& rec : records) windows.push_back(rec.window.values);
        ClusterModel model = self_cluster(windows, cfg.n_max, cfg.seed);
        labels = model.labels;
        k = model.k;
        centroids.resize(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            centroids[static_cast<std::size_t>(c)] = model.centroids.row(c).transpose();
        }
    } else {
        labels.assign(records.size(), 0);
        centroids = {records.front().window.values};
    }

    std::vector<std::vector<ErrorRecord>> grouped(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < records.size(); ++i) {
        grouped[static_cast<std::size_t>(labels[i])].push_back(records[i]);
    }
    for (int c = 0; c < k; ++c) {
        const auto& group = grouped[static_cast<std::size_t>(c)];
        // Coincident windows can leave a class hollow; drop it so every
        // stored class holds at least one record.
        if (group.empty()) continue;
        ClusterEntry entry;
        entry.centroid = centroids[static_cast<std::size_t>(c)];
        for (const auto& rec : group) {
            entry.windows.push_back(rec.window);
            entry.errors.push_back(rec.errors);
        }
        entry.merged = adaptive_merge(cfg.theta, build_step_sets(group));
        store.clusters.push_back(std::move(entry));
    }

    std::size_t s = records.size();
    for (const auto& c : store.clusters) s = std::min(s, c.windows.size());
    store.smallest_cluster_size = s;
    return store;
}

CalibrationStore dscp_calibrate(const Predictor& pred, const SeriesFrame& calib, const StoreConfig& cfg,
                                int a, int b) {
    const auto pairs = make_supervised(calib, a, b);
    if (pairs.size() < 4) {
        throw TooShort("calibration yields only " + std::to_string(pairs.size()) +
                       " supervised pairs, needs at least 4");
    }
    std::vector<ErrorRecord> records;
    records.reserve(pairs.size());
    for (const auto& p : pairs) {
        records.push_back(signed_errors(p.truth, predict(pred, p.input, p.anchor)));
    }
    return dscp_calibrate_records(records, cfg);
}

IntervalSeries dscp_predict(const CalibrationStore& store, const ForecastWindow& window, double alpha,
                            QuantileMode mode) {
    if (window.values.size() != store.horizon) {
        throw HorizonMismatch("window horizon " + std::to_string(window.values.size()) +
                              " vs store horizon " + std::to_string(store.horizon));
    }
    check_alpha(alpha);
    const int label = assign_cluster(window, store);
    const auto& cluster = store.clusters[static_cast<std::size_t>(label)];

    IntervalSeries iv;
    iv.anchor = window.anchor;
    iv.alpha = alpha;
    iv.pred = window.values;
    iv.lower.resize(window.values.size());
    iv.upper.resize(window.values.size());

    bool usable = !cluster.windows.empty() && !cluster.merged.range_sets.empty();
    if (usable) {
        for (const auto& s : cluster.merged.range_sets) usable = usable && !s.empty();
    }
    if (usable) {
        for (int j = 1; j <= store.horizon; ++j) {
            const auto [q_lo, q_hi] = conformal_quantiles_sorted(cluster.merged.step_set(j), alpha, mode);
            iv.lower[j - 1] = window.values[j - 1] + q_lo;
            iv.upper[j - 1] = window.values[j - 1] + q_hi;
        }
        return iv;
    }

    // Unusable class: fall back to the pooled errors of the whole store and say so.
    std::vector<double> pool = store.pooled_errors();
    if (pool.empty()) throw EmptyCluster("store holds no errors at all");
    std::sort(pool.begin(), pool.end());
    const auto [q_lo, q_hi] = conformal_quantiles_sorted(pool, alpha, mode);
    for (Eigen::Index j = 0; j < window.values.size(); ++j) {
        iv.lower[j] = window.values[j] + q_lo;
        iv.upper[j] = window.values[j] + q_hi;
    }
    iv.pooled_fallback = true;
    return iv;
}

CalibrationStore dscp_update(const CalibrationStore& store, const ForecastWindow& window,
                             const Eigen::VectorXd& truth) {
    if (window.values.size() != store.horizon || truth.size() != store.horizon) {
        throw HorizonMismatch("update window/truth do not match the store horizon");
    }
    const ErrorRecord rec = signed_errors(truth, window);
    const int label = assign_cluster(window, store);

    CalibrationStore out = store;
    auto& cluster = out.clusters[static_cast<std::size_t>(label)];
    cluster.windows.push_back(window);
    cluster.errors.push_back(rec.errors);

    std::vector<ErrorRecord> members;
    members.reserve(cluster.windows.size());
    for (std::size_t i = 0; i < cluster.windows.size(); ++i) {
        ErrorRecord r;
        r.window = cluster.windows[i];
        r.errors = cluster.errors[i];
        members.push_back(std::move(r));
    }
    cluster.merged = adaptive_merge(out.config.theta, build_step_sets(members));

    std::size_t s = out.total_records();
    for (const auto& c : out.clusters) {
        if (!c.windows.empty()) s = std::min(s, c.windows.size());
    }
    out.smallest_cluster_size = s;
    return out;
}

IntervalSeries cp_interval_pool(const std::vector<double>& sorted_abs, const ForecastWindow& window,
                                double alpha, QuantileMode mode) {
    const double q = conservative_upper(sorted_abs, alpha, mode);
    IntervalSeries iv;
    iv.anchor = window.anchor;
    iv.alpha = alpha;
    iv.pred = window.values;
    iv.lower = window.values.array() - q;
    iv.upper = window.values.array() + q;
    return iv;
}

IntervalSeries cp_interval(const std::vector<ErrorRecord>& records, const ForecastWindow& window,
                           double alpha, QuantileMode mode) {
    return cp_interval_pool(sorted_abs_pool(records), window, alpha, mode);
}

IntervalSeries per_step_cp_interval(const std::vector<ErrorRecord>& records, const ForecastWindow& window,
                                    double alpha, QuantileMode mode) {
    if (records.empty()) throw EmptySet("no calibration records");
    const Eigen::Index b = window.values.size();
    for (const auto& rec : records) {
        if (rec.errors.size() != b) {
            throw HorizonMismatch("record horizon does not match the window");
        }
    }
    IntervalSeries iv;
    iv.anchor = window.anchor;
    iv.alpha = alpha;
    iv.pred = window.values;
    iv.lower.resize(b);
    iv.upper.resize(b);
    std::vector<double> pool(records.size());
    for (Eigen::Index j = 0; j < b; ++j) {
        for (std::size_t r = 0; r < records.size(); ++r) pool[r] = std::abs(records[r].errors[j]);
        std::sort(pool.begin(), pool.end());
        const double q = conservative_upper(pool, alpha, mode);
        iv.lower[j] = window.values[j] - q;
        iv.upper[j] = window.values[j] + q;
    }
    return iv;
}

EnbpiState EnbpiState::from_errors(const std::vector<double>& abs_errors, std::size_t capacity) {
    if (capacity == 0) throw InvalidSpec("enbpi capacity must be positive");
    EnbpiState state;
    state.capacity = capacity;
    const std::size_t start = abs_errors.size() > capacity ? abs_errors.size() - capacity : 0;
    for (std::size_t i = start; i < abs_errors.size(); ++i) state.pool.push_back(abs_errors[i]);
    return state;
}

IntervalSeries enbpi_style_interval(const EnbpiState& state, const ForecastWindow& window, double alpha,
                                    QuantileMode mode) {
    if (state.pool.empty()) throw EmptySample("enbpi pool is empty");
    std::vector<double> sorted(state.pool.begin(), state.pool.end());
    std::sort(sorted.begin(), sorted.end());
    return cp_interval_pool(sorted, window, alpha, mode);
}

void enbpi_style_update(EnbpiState& state, const Eigen::VectorXd& truth, const IntervalSeries& interval) {
    if (truth.size() != interval.horizon()) {
        throw ShapeMismatch("truth does not match the interval horizon");
    }
    for (Eigen::Index j = 0; j < truth.size(); ++j) {
        // Midpoint of the symmetric baseline interval is the point forecast.
        const double mid = 0.5 * (interval.lower[j] + interval.upper[j]);
        state.pool.push_back(std::abs(truth[j] - mid));
    }
    while (state.pool.size() > state.capacity) state.pool.pop_front();
}

double aci_step(double alpha_t, double alpha_target, double gamma, bool covered) {
    if (!(gamma > 0.0)) throw InvalidSpec("gamma must be positive");
    const double err = covered ? 0.0 : 1.0;
    const double eps = 1e-4;
    return std::clamp(alpha_t + gamma * (alpha_target - err), eps, 1.0 - eps);
}

}  // namespace dscp
