#include "dscp/bench.hpp"

#include "dscp/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace dscp {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct TestSet {
    std::vector<ForecastWindow> windows;
    std::vector<Eigen::VectorXd> truths;
};

// Per-alpha interval construction for one method over the whole test set.
struct MethodPass {
    std::vector<IntervalSeries> intervals;
};

void append_rows(BenchmarkResult& result, const std::string& method, double alpha,
                 const std::vector<IntervalSeries>& intervals, const std::vector<Eigen::VectorXd>& truths) {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        for (Eigen::Index j = 0; j < iv.horizon(); ++j) {
            result.intervals.push_back({method, alpha, iv.anchor, static_cast<int>(j + 1), iv.lower[j],
                                        iv.pred[j], iv.upper[j], truths[i][j]});
        }
    }
}

// Quantile pairs per (cluster, step) so repeated predicts cost one
// assignment each; mirrors dscp_predict exactly.
struct DscpTable {
    std::vector<std::vector<std::pair<double, double>>> per_cluster;  // [cluster][step-1]
    std::vector<bool> usable;
    std::pair<double, double> pooled;
    bool pooled_ok = false;
};

DscpTable dscp_table(const CalibrationStore& store, double alpha, QuantileMode mode) {
    DscpTable table;
    table.per_cluster.resize(store.clusters.size());
    table.usable.resize(store.clusters.size());
    for (std::size_t c = 0; c < store.clusters.size(); ++c) {
        const auto& cluster = store.clusters[c];
        bool ok = !cluster.windows.empty() && !cluster.merged.range_sets.empty();
        for (const auto& s : cluster.merged.range_sets) ok = ok && !s.empty();
        table.usable[c] = ok;
        if (!ok) continue;
        auto& steps = table.per_cluster[c];
        steps.resize(static_cast<std::size_t>(store.horizon));
        for (int j = 1; j <= store.horizon; ++j) {
            steps[static_cast<std::size_t>(j - 1)] =
                conformal_quantiles_sorted(cluster.merged.step_set(j), alpha, mode);
        }
    }
    std::vector<double> pool = store.pooled_errors();
    if (!pool.empty()) {
        std::sort(pool.begin(), pool.end());
        table.pooled = conformal_quantiles_sorted(pool, alpha, mode);
        table.pooled_ok = true;
    }
    return table;
}

IntervalSeries interval_from_table(const DscpTable& table, const ForecastWindow& window, int label,
                                   double alpha) {
    IntervalSeries iv;
    iv.anchor = window.anchor;
    iv.alpha = alpha;
    iv.pred = window.values;
    iv.lower.resize(window.values.size());
    iv.upper.resize(window.values.size());
    if (table.usable[static_cast<std::size_t>(label)]) {
        const auto& steps = table.per_cluster[static_cast<std::size_t>(label)];
        for (Eigen::Index j = 0; j < window.values.size(); ++j) {
            iv.lower[j] = window.values[j] + steps[static_cast<std::size_t>(j)].first;
            iv.upper[j] = window.values[j] + steps[static_cast<std::size_t>(j)].second;
        }
        return iv;
    }
    if (!table.pooled_ok) throw EmptyCluster("store holds no errors at all");
    for (Eigen::Index j = 0; j < window.values.size(); ++j) {
        iv.lower[j] = window.values[j] + table.pooled.first;
        iv.upper[j] = window.values[j] + table.pooled.second;
    }
    iv.pooled_fallback = true;
    return iv;
}

}  // namespace

void RunConfig::validate() const {
    if (data_path.has_value() == scenario.has_value()) {
        throw InvalidSpec("exactly one of data/scenario must be set");
    }
    double total = 0.0;
    for (double f : split) {
        if (!(f > 0.0)) throw InvalidSpec("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidSpec("split fractions must sum to 1");
    if (a < 1 || b < 1) throw InvalidSpec("a and b must be at least 1");
    if (methods.empty()) throw InvalidSpec("at least one method required");
    if (alphas.empty()) throw InvalidSpec("at least one alpha required");
    for (double alpha : alphas) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidSpec("alphas must lie in (0, 1)");
    }
    if (!(theta > 0.0 && theta <= 1.0)) throw InvalidSpec("theta must lie in (0, 1]");
    if (!(gamma_aci > 0.0)) throw InvalidSpec("gamma_aci must be positive");
    if (n_max < 2) throw InvalidSpec("N_max must be at least 2");
    if (!(gamma_dtw > 0.0)) throw InvalidSpec("gamma_dtw must be positive");
    if (enbpi_capacity < 1) throw InvalidSpec("enbpi_capacity must be positive");
    if (recluster_every < 0) throw InvalidSpec("recluster_every must be nonnegative");
}

std::array<SeriesFrame, 3> split_frame(const SeriesFrame& frame, const std::array<double, 3>& fractions) {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw InvalidSpec("split fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidSpec("split fractions must sum to 1");
    const auto n = frame.size();
    const auto n_train = static_cast<Eigen::Index>(std::floor(fractions[0] * static_cast<double>(n)));
    const auto n_calib = static_cast<Eigen::Index>(std::floor(fractions[1] * static_cast<double>(n)));
    const auto n_test = n - n_train - n_calib;
    if (n_train < 1 || n_calib < 1 || n_test < 1) {
        throw TooShort("series too short for the requested split");
    }
    auto slice = [&frame](Eigen::Index start, Eigen::Index len) {
        SeriesFrame part;
        part.stride = frame.stride;
        part.timestamps.assign(frame.timestamps.begin() + start, frame.timestamps.begin() + start + len);
        part.target = frame.target.segment(start, len);
        if (frame.has_features()) part.features = frame.features.middleRows(start, len);
        return part;
    };
    return {slice(0, n_train), slice(n_train, n_calib), slice(n_train + n_calib, n_test)};
}

BenchmarkResult run_benchmark(const RunConfig& cfg, const std::function<void(const EvalReport&)>& on_report) {
    cfg.validate();
    const SeriesFrame frame =
        cfg.data_path ? read_series_csv(*cfg.data_path) : generate(*cfg.scenario).frame;
    const auto parts = split_frame(frame, cfg.split);
    const auto& train = parts[0];
    const auto& calib = parts[1];
    const auto& test = parts[2];
    const Eigen::Index calib_start = train.size();
    const Eigen::Index test_start = train.size() + calib.size();

    const Predictor pred = fit(cfg.predictor, train, cfg.a, cfg.b);
    const QuantileMode mode =
        cfg.interpolated_quantiles ? QuantileMode::interpolated : QuantileMode::conservative;

    // Calibration records, anchors in the frame's global clock.
    std::vector<ErrorRecord> records;
    for (const auto& p : make_supervised(calib, cfg.a, cfg.b)) {
        records.push_back(signed_errors(p.truth, predict(pred, p.input, calib_start + p.anchor)));
    }
    if (records.empty()) throw TooShort("calibration segment yields no supervised pairs");

    TestSet ts;
    for (const auto& p : make_supervised(test, cfg.a, cfg.b)) {
        ts.windows.push_back(predict(pred, p.input, test_start + p.anchor));
        ts.truths.push_back(p.truth);
    }
    if (ts.windows.empty()) throw TooShort("test segment yields no supervised pairs");

    // Shared pools for the symmetric baselines.
    std::vector<double> abs_pool;
    for (const auto& rec : records) {
        for (Eigen::Index j = 0; j < rec.errors.size(); ++j) abs_pool.push_back(std::abs(rec.errors[j]));
    }
    std::vector<double> abs_pool_sorted = abs_pool;
    std::sort(abs_pool_sorted.begin(), abs_pool_sorted.end());
    std::vector<std::vector<double>> step_pools(static_cast<std::size_t>(cfg.b));
    for (const auto& rec : records) {
        for (Eigen::Index j = 0; j < rec.errors.size(); ++j) {
            step_pools[static_cast<std::size_t>(j)].push_back(std::abs(rec.errors[j]));
        }
    }
    for (auto& pool : step_pools) std::sort(pool.begin(), pool.end());

    BenchmarkResult result;
    for (const Method method : cfg.methods) {
        if (method == Method::dscp) {
            StoreConfig scfg;
            scfg.theta = cfg.theta;
            scfg.n_max = cfg.n_max;
            scfg.gamma_dtw = cfg.gamma_dtw;
            scfg.alpha_default = cfg.alphas.front();
            scfg.seed = cfg.seed;
            const CalibrationStore store = dscp_calibrate_records(records, scfg);
            if (cfg.recluster_every == 0) {
                // Static store: classify each window once, reuse across alphas.
                std::vector<int> labels(ts.windows.size());
                for (std::size_t i = 0; i < ts.windows.size(); ++i) {
                    labels[i] = assign_cluster(ts.windows[i], store);
                }
                for (double alpha : cfg.alphas) {
                    const DscpTable table = dscp_table(store, alpha, mode);
                    MethodPass pass;
                    for (std::size_t i = 0; i < ts.windows.size(); ++i) {
                        pass.intervals.push_back(
                            interval_from_table(table, ts.windows[i], labels[i], alpha));
                    }
                    const EvalReport report = evaluate(method_name(method), pass.intervals, ts.truths, alpha);
                    result.reports.push_back(report);
                    if (on_report) on_report(report);
                    append_rows(result, method_name(method), alpha, pass.intervals, ts.truths);
                }
            } else {
                // Updating variant: consume each truth, recluster on the cadence.
                for (double alpha : cfg.alphas) {
                    CalibrationStore live = store;
                    std::vector<ErrorRecord> seen = records;
                    MethodPass pass;
                    for (std::size_t i = 0; i < ts.windows.size(); ++i) {
                        pass.intervals.push_back(dscp_predict(live, ts.windows[i], alpha, mode));
                        seen.push_back(signed_errors(ts.truths[i], ts.windows[i]));
                        if ((i + 1) % static_cast<std::size_t>(cfg.recluster_every) == 0) {
                            live = dscp_calibrate_records(seen, scfg);
                        } else {
                            live = dscp_update(live, ts.windows[i], ts.truths[i]);
                        }
                    }
                    const EvalReport report = evaluate(method_name(method), pass.intervals, ts.truths, alpha);
                    result.reports.push_back(report);
                    if (on_report) on_report(report);
                    append_rows(result, method_name(method), alpha, pass.intervals, ts.truths);
                }
            }
            continue;
        }

        for (double alpha : cfg.alphas) {
            MethodPass pass;
            switch (method) {
                case Method::cp: {
                    for (const auto& w : ts.windows) {
                        pass.intervals.push_back(cp_interval_pool(abs_pool_sorted, w, alpha, mode));
                    }
                    break;
                }
                case Method::per_step_cp: {
                    std::vector<double> qs(static_cast<std::size_t>(cfg.b));
                    for (int j = 0; j < cfg.b; ++j) {
                        qs[static_cast<std::size_t>(j)] =
                            conservative_upper(step_pools[static_cast<std::size_t>(j)], alpha, mode);
                    }
                    for (const auto& w : ts.windows) {
                        IntervalSeries iv;
                        iv.anchor = w.anchor;
                        iv.alpha = alpha;
                        iv.pred = w.values;
                        iv.lower.resize(w.values.size());
                        iv.upper.resize(w.values.size());
                        for (Eigen::Index j = 0; j < w.values.size(); ++j) {
                            iv.lower[j] = w.values[j] - qs[static_cast<std::size_t>(j)];
                            iv.upper[j] = w.values[j] + qs[static_cast<std::size_t>(j)];
                        }
                        pass.intervals.push_back(std::move(iv));
                    }
                    break;
                }
                case Method::enbpi_style: {
                    EnbpiState state = EnbpiState::from_errors(abs_pool, cfg.enbpi_capacity);
                    for (std::size_t i = 0; i < ts.windows.size(); ++i) {
                        IntervalSeries iv = enbpi_style_interval(state, ts.windows[i], alpha, mode);
                        enbpi_style_update(state, ts.truths[i], iv);
                        pass.intervals.push_back(std::move(iv));
                    }
                    break;
                }
                case Method::aci: {
                    double alpha_t = alpha;
                    for (std::size_t i = 0; i < ts.windows.size(); ++i) {
                        IntervalSeries iv = cp_interval_pool(abs_pool_sorted, ts.windows[i], alpha_t, mode);
                        iv.alpha = alpha;
                        // One shared alpha_t per window; each observed step feeds
                        // one boolean update.
                        for (Eigen::Index j = 0; j < iv.horizon(); ++j) {
                            const bool covered =
                                ts.truths[i][j] >= iv.lower[j] && ts.truths[i][j] <= iv.upper[j];
                            alpha_t = aci_step(alpha_t, alpha, cfg.gamma_aci, covered);
                        }
                        pass.intervals.push_back(std::move(iv));
                    }
                    break;
                }
                default:
                    throw InvalidSpec("unhandled method");
            }
            const EvalReport report = evaluate(method_name(method), pass.intervals, ts.truths, alpha);
            result.reports.push_back(report);
            if (on_report) on_report(report);
            append_rows(result, method_name(method), alpha, pass.intervals, ts.truths);
        }
    }
    return result;
}

std::vector<SweepRow> sensitivity_sweep(const RunConfig& cfg, const std::vector<int>& horizons) {
    if (horizons.empty()) throw InvalidSpec("no horizons to sweep");
    std::vector<SweepRow> rows;
    for (int b : horizons) {
        RunConfig sub = cfg;
        sub.b = b;
        const BenchmarkResult res = run_benchmark(sub);
        for (const auto& report : res.reports) rows.push_back({b, report});
    }
    return rows;
}

std::string intervals_csv(const std::vector<IntervalRow>& rows) {
    std::ostringstream out;
    out << "method,alpha,anchor,step,lower,pred,upper,truth\n";
    for (const auto& r : rows) {
        out << r.method << ',' << fmt(r.alpha) << ',' << r.anchor << ',' << r.step << ',' << fmt(r.lower)
            << ',' << fmt(r.pred) << ',' << fmt(r.upper) << ',' << fmt(r.truth) << '\n';
    }
    return out.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "method,b,alpha,delta_cov,pi_width,winkler,n_windows,n_points\n";
    for (const auto& r : rows) {
        out << r.report.method << ',' << r.b << ',' << fmt(r.report.alpha) << ','
            << fmt(r.report.delta_cov) << ',' << fmt(r.report.pi_width) << ',' << fmt(r.report.winkler)
            << ',' << r.report.n_windows << ',' << r.report.n_points << '\n';
    }
    return out.str();
}

void write_benchmark_outputs(const RunConfig& cfg, const BenchmarkResult& result) {
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/report.csv");
        out << report_csv_header() << "\n";
        for (const auto& r : result.reports) out << report_csv_row(r) << "\n";
    }
    {
        std::ofstream out(cfg.out_dir + "/report.json");
        out << report_json(result.reports) << "\n";
    }
    {
        std::ofstream out(cfg.out_dir + "/intervals.csv");
        out << intervals_csv(result.intervals);
    }
}

namespace {

ScenarioSpec scenario_from_config(const json& doc) {
    ScenarioSpec spec;
    spec.kind = scenario_kind_from_name(doc.at("scenario").get<std::string>());
    if (doc.contains("length")) spec.length = doc["length"].get<int>();
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("period")) spec.period = doc["period"].get<int>();
    if (doc.contains("amplitude")) spec.amplitude = doc["amplitude"].get<double>();
    if (doc.contains("sigma_high")) spec.sigma_high = doc["sigma_high"].get<double>();
    if (doc.contains("sigma_low")) spec.sigma_low = doc["sigma_low"].get<double>();
    if (doc.contains("amp_high")) spec.amp_high = doc["amp_high"].get<double>();
    if (doc.contains("amp_low")) spec.amp_low = doc["amp_low"].get<double>();
    if (doc.contains("block")) spec.block = doc["block"].get<int>();
    if (doc.contains("shift_point")) spec.shift_point = doc["shift_point"].get<int>();
    if (doc.contains("phi")) spec.phi = doc["phi"].get<double>();
    if (doc.contains("sigma")) spec.sigma = doc["sigma"].get<double>();
    return spec;
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config: ") + e.what());
    }
    static const char* known[] = {
        "data",     "scenario",   "split",           "a",
        "b",        "predictor",  "period",          "ar_order",
        "ridge",    "methods",    "alpha",           "theta",
        "gamma_aci", "N_max",     "gamma_dtw",       "seed",
        "out_dir",  "recluster_every", "enbpi_capacity", "interpolated_quantiles",
        "length",   "amplitude",  "sigma_high",      "sigma_low",
        "amp_high", "amp_low",    "block",           "shift_point",
        "phi",      "sigma",
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw InvalidSpec("unknown config key '" + it.key() + "'");
    }

    RunConfig cfg;
    try {
        if (doc.contains("data")) cfg.data_path = doc["data"].get<std::string>();
        if (doc.contains("scenario")) cfg.scenario = scenario_from_config(doc);
        if (doc.contains("split")) {
            const auto split = doc["split"].get<std::vector<double>>();
            if (split.size() != 3) throw InvalidSpec("split needs exactly 3 fractions");
            std::copy(split.begin(), split.end(), cfg.split.begin());
        }
        if (doc.contains("a")) cfg.a = doc["a"].get<int>();
        if (doc.contains("b")) cfg.b = doc["b"].get<int>();
        if (doc.contains("predictor")) {
            const auto kind = doc["predictor"].get<std::string>();
            if (kind == "seasonal_naive") cfg.predictor.kind = PredictorKind::seasonal_naive;
            else if (kind == "linear_ar") cfg.predictor.kind = PredictorKind::linear_ar;
            else throw InvalidSpec("unknown predictor '" + kind + "'");
        }
        if (doc.contains("period")) cfg.predictor.period = doc["period"].get<int>();
        if (doc.contains("ar_order")) cfg.predictor.order = doc["ar_order"].get<int>();
        if (doc.contains("ridge")) cfg.predictor.ridge = doc["ridge"].get<double>();
        if (doc.contains("methods")) {
            cfg.methods.clear();
            for (const auto& name : doc["methods"]) cfg.methods.push_back(method_from_name(name.get<std::string>()));
        }
        if (doc.contains("alpha")) cfg.alphas = doc["alpha"].get<std::vector<double>>();
        if (doc.contains("theta")) cfg.theta = doc["theta"].get<double>();
        if (doc.contains("gamma_aci")) cfg.gamma_aci = doc["gamma_aci"].get<double>();
        if (doc.contains("N_max")) cfg.n_max = doc["N_max"].get<int>();
        if (doc.contains("gamma_dtw")) cfg.gamma_dtw = doc["gamma_dtw"].get<double>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
        if (doc.contains("recluster_every")) cfg.recluster_every = doc["recluster_every"].get<int>();
        if (doc.contains("enbpi_capacity")) cfg.enbpi_capacity = doc["enbpi_capacity"].get<std::size_t>();
        if (doc.contains("interpolated_quantiles")) {
            cfg.interpolated_quantiles = doc["interpolated_quantiles"].get<bool>();
        }
        if (cfg.scenario) cfg.scenario->seed = cfg.seed;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return run_config_from_json(text);
}

}  // namespace dscp
