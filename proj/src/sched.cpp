#include "dscp/sched.hpp"

#include "dscp/conformal.hpp"
#include "dscp/predictors.hpp"
#include "dscp/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dscp {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double brown_energy(double w_d, double w_l, double w_re) {
    if (w_d < 0.0 || w_l < 0.0 || w_re < 0.0) throw InvalidSpec("power figures must be nonnegative");
    return std::max(w_d + w_l - w_re, 0.0);
}

double plan_cost(const SchedulePlan& plan, const EnergyScenario& sc, const Eigen::VectorXd& renewable_est,
                 const Eigen::VectorXd& running_load) {
    const Eigen::Index len = plan.alloc.size();
    if (renewable_est.size() != len || running_load.size() != len) {
        throw ShapeMismatch("estimate traces must match the plan length");
    }
    if (plan.tau < 0 || plan.tau + len > sc.size()) {
        throw ShapeMismatch("plan window falls outside the scenario");
    }
    if (std::abs(plan.committed() + plan.deferred - plan.demand) > 1e-9) {
        throw InfeasiblePlan("allocations plus deferral must match demand");
    }
    double cost = 0.0;
    double weight = 1.0;
    for (Eigen::Index k = 0; k < len; ++k) {
        const double phi = brown_energy(plan.alloc[k], running_load[k], renewable_est[k]);
        cost += phi * sc.price[plan.tau + k] * weight;
        weight *= sc.gamma;
    }
    // weight is now gamma^len, the deferral discount.
    cost += plan.deferred * sc.p_max() * weight;
    return cost;
}

EffectiveForecast effective_forecast(const IntervalSeries& renewable_iv, const IntervalSeries& load_iv,
                                     const RiskPolicy& policy) {
    if (renewable_iv.horizon() != load_iv.horizon()) {
        throw Misaligned("renewable and load forecasts must share a horizon");
    }
    if (!(policy.lambda_risk >= 0.0 && policy.lambda_risk <= 1.0)) {
        throw InvalidSpec("lambda_risk must lie in [0, 1]");
    }
    const double lam = policy.lambda_risk;
    EffectiveForecast est;
    est.renewable = (renewable_iv.lower + lam * (renewable_iv.upper - renewable_iv.lower)).cwiseMax(0.0);
    est.load = (load_iv.upper - lam * (load_iv.upper - load_iv.lower)).cwiseMax(0.0);
    return est;
}

SchedulePlan solve_window(const EffectiveForecast& est, double backlog, const EnergyScenario& sc,
                          std::int64_t tau, const Eigen::VectorXd& running_load) {
    const Eigen::Index len = est.renewable.size();
    if (len < 1) throw ShapeMismatch("empty planning window");
    if (est.load.size() != len || running_load.size() != len) {
        throw ShapeMismatch("estimate traces must share the window length");
    }
    if (tau < 0 || tau + len > sc.size()) throw ShapeMismatch("window falls outside the scenario");
    if (backlog < 0.0) throw InvalidSpec("backlog must be nonnegative");

    SchedulePlan plan;
    plan.tau = tau;
    plan.alloc = Eigen::VectorXd::Zero(len);
    plan.demand = est.load.sum() + backlog;

    // Free capacity first: anything under the renewable line costs nothing.
    double remaining = plan.demand;
    for (Eigen::Index k = 0; k < len && remaining > 0.0; ++k) {
        const double headroom = std::max(est.renewable[k] - running_load[k], 0.0);
        const double take = std::min(remaining, headroom);
        plan.alloc[k] += take;
        remaining -= take;
    }
    if (remaining > 0.0) {
        // Past headroom the marginal cost of slot k is flat, so the whole
        // remainder belongs in the single cheapest discounted slot, or past
        // the window when the deferral penalty undercuts them all.
        Eigen::Index best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        double weight = 1.0;
        for (Eigen::Index k = 0; k < len; ++k) {
            const double cost = sc.price[tau + k] * weight;
            if (cost < best_cost) {
                best_cost = cost;
                best = k;
            }
            weight *= sc.gamma;
        }
        const double defer_cost = sc.p_max() * weight;
        if (best_cost <= defer_cost) {
            plan.alloc[best] += remaining;
        } else {
            plan.deferred = remaining;
        }
    }
    return plan;
}

ForecasterKind forecaster_from_name(const std::string& name) {
    if (name == "perfect") return ForecasterKind::perfect;
    if (name == "none_cp") return ForecasterKind::none_cp;
    if (name == "dscp") return ForecasterKind::dscp;
    throw InvalidSpec("unknown forecaster '" + name + "'");
}

PackStrategy strategy_from_name(const std::string& name) {
    if (name == "first_fit") return PackStrategy::first_fit;
    if (name == "round_robin") return PackStrategy::round_robin;
    throw InvalidSpec("unknown strategy '" + name + "'");
}

namespace {

const char* forecaster_name(ForecasterKind kind) {
    switch (kind) {
        case ForecasterKind::perfect: return "perfect";
        case ForecasterKind::none_cp: return "none_cp";
        default: return "dscp";
    }
}

const char* strategy_name(PackStrategy strategy) {
    return strategy == PackStrategy::first_fit ? "first_fit" : "round_robin";
}

void check_scenario(const EnergyScenario& sc) {
    const Eigen::Index n = sc.size();
    if (sc.load_kw.size() != n || sc.price.size() != n) {
        throw ShapeMismatch("scenario traces must share a length");
    }
    if (n < 1) throw TooShort("empty scenario");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sc.renewable_kw[i] < 0.0 || sc.load_kw[i] < 0.0) {
            throw InvalidSpec("traces must be nonnegative");
        }
        if (!(sc.price[i] > 0.0)) throw InvalidSpec("prices must be positive");
    }
    if (!(sc.gamma > 0.0 && sc.gamma <= 1.0)) throw InvalidSpec("gamma must lie in (0, 1]");
    if (sc.window_n < 1) throw InvalidSpec("window_n must be at least 1");
    if (!(sc.carbon_intensity >= 0.0)) throw InvalidSpec("carbon intensity must be nonnegative");
}

SeriesFrame trace_frame(const Eigen::VectorXd& trace) {
    SeriesFrame frame;
    frame.stride = 1;
    frame.timestamps.resize(static_cast<std::size_t>(trace.size()));
    for (Eigen::Index i = 0; i < trace.size(); ++i) frame.timestamps[static_cast<std::size_t>(i)] = i;
    frame.target = trace;
    return frame;
}

SeriesFrame head_frame(const SeriesFrame& frame, Eigen::Index len) {
    SeriesFrame part;
    part.stride = frame.stride;
    part.timestamps.assign(frame.timestamps.begin(), frame.timestamps.begin() + len);
    part.target = frame.target.head(len);
    return part;
}

IntervalSeries degenerate_interval(std::int64_t anchor, const Eigen::VectorXd& values, double alpha) {
    IntervalSeries iv;
    iv.anchor = anchor;
    iv.alpha = alpha;
    iv.lower = values;
    iv.pred = values;
    iv.upper = values;
    return iv;
}

IntervalSeries truncate_interval(const IntervalSeries& iv, Eigen::Index len) {
    if (iv.horizon() == len) return iv;
    IntervalSeries out;
    out.anchor = iv.anchor;
    out.alpha = iv.alpha;
    out.lower = iv.lower.head(len);
    out.pred = iv.pred.head(len);
    out.upper = iv.upper.head(len);
    out.pooled_fallback = iv.pooled_fallback;
    return out;
}

// One forecast pipeline (predictor + optional dscp store) for a single trace.
struct TraceForecaster {
    ForecasterKind kind = ForecasterKind::perfect;
    double alpha = 0.1;
    const Eigen::VectorXd* truth = nullptr;
    Predictor pred;
    CalibrationStore store;

    IntervalSeries forecast(std::int64_t tau, Eigen::Index len) const {
        if (kind == ForecasterKind::perfect) {
            return degenerate_interval(tau - 1, truth->segment(tau, len), alpha);
        }
        const Eigen::VectorXd input = truth->segment(tau - pred.input_len, pred.input_len);
        const ForecastWindow window = predict(pred, input, tau - 1);
        if (kind == ForecasterKind::none_cp) {
            return truncate_interval(degenerate_interval(window.anchor, window.values, alpha), len);
        }
        return truncate_interval(dscp_predict(store, window, alpha, QuantileMode::conservative), len);
    }
};

TraceForecaster build_forecaster(const Eigen::VectorXd& trace, const EnergyScenario& sc,
                                 const SimConfig& cfg, std::uint64_t seed) {
    TraceForecaster fc;
    fc.kind = cfg.forecaster;
    fc.alpha = cfg.alpha;
    fc.truth = &trace;
    if (cfg.forecaster == ForecasterKind::perfect) return fc;

    const Eigen::Index n = sc.size();
    const Eigen::Index half = n / 2;
    const Eigen::Index three_q = (3 * n) / 4;
    const SeriesFrame frame = trace_frame(trace);

    PredictorSpec spec;
    spec.kind = PredictorKind::seasonal_naive;
    spec.period = cfg.period;
    fc.pred = fit(spec, head_frame(frame, half), cfg.a, sc.window_n);
    if (cfg.forecaster == ForecasterKind::none_cp) return fc;

    std::vector<ErrorRecord> records;
    const Eigen::Index first = std::max<Eigen::Index>(half, cfg.a - 1);
    for (Eigen::Index t = first; t + sc.window_n < three_q; ++t) {
        const Eigen::VectorXd input = trace.segment(t - cfg.a + 1, cfg.a);
        const ForecastWindow window = predict(fc.pred, input, t);
        records.push_back(signed_errors(trace.segment(t + 1, sc.window_n), window));
    }
    if (records.empty()) throw TooShort("calibration quarter yields no forecast windows");
    StoreConfig scfg;
    scfg.theta = cfg.theta;
    scfg.n_max = cfg.n_max;
    scfg.gamma_dtw = cfg.gamma_dtw;
    scfg.alpha_default = cfg.alpha;
    scfg.seed = seed;
    fc.store = dscp_calibrate_records(records, scfg);
    return fc;
}

Eigen::VectorXd pack_machines(double executed, const SimConfig& cfg, PackStrategy strategy) {
    Eigen::VectorXd kw = Eigen::VectorXd::Zero(cfg.machines);
    if (strategy == PackStrategy::first_fit) {
        double remaining = executed;
        for (int i = 0; i < cfg.machines && remaining > 0.0; ++i) {
            const double take = std::min(remaining, cfg.machine_cap_kw);
            kw[i] = take;
            remaining -= take;
        }
    } else {
        kw.setConstant(executed / cfg.machines);
    }
    return kw;
}

}  // namespace

SimResult simulate(const EnergyScenario& sc, const SimConfig& cfg) {
    check_scenario(sc);
    if (!(cfg.lambda_risk >= 0.0 && cfg.lambda_risk <= 1.0)) throw InvalidSpec("lambda_risk must lie in [0, 1]");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw InvalidSpec("alpha must lie in (0, 1)");
    if (cfg.task_duration < 1) throw InvalidSpec("task_duration must be at least 1");
    if (cfg.machines < 1 || !(cfg.machine_cap_kw > 0.0)) throw InvalidSpec("need at least one machine with positive capacity");
    if (cfg.a < 1) throw InvalidSpec("input length must be at least 1");

    const Eigen::Index n = sc.size();
    const Eigen::Index sim_start = (3 * n) / 4;
    if (sim_start < 1 || sim_start >= n) throw TooShort("scenario too short to simulate");
    if (sim_start - cfg.a < 0) throw TooShort("scenario too short for the forecaster input");

    const TraceForecaster fc_re = build_forecaster(sc.renewable_kw, sc, cfg, cfg.seed);
    const TraceForecaster fc_load = build_forecaster(sc.load_kw, sc, cfg, cfg.seed + 1);
    const RiskPolicy policy{cfg.lambda_risk};
    const double capacity = cfg.machine_cap_kw * cfg.machines;

    SimResult result;
    result.sim_start = sim_start;
    double backlog = 0.0;
    // carry[i]: kW of previously started tasks still running at step tau+i.
    std::vector<double> carry(static_cast<std::size_t>(std::max(cfg.task_duration - 1, 0)), 0.0);

    for (Eigen::Index tau = sim_start; tau < n; ++tau) {
        const Eigen::Index len = std::min<Eigen::Index>(sc.window_n, n - tau);
        const IntervalSeries re_iv = fc_re.forecast(tau, len);
        const IntervalSeries load_iv = fc_load.forecast(tau, len);
        const EffectiveForecast est = effective_forecast(re_iv, load_iv, policy);

        Eigen::VectorXd running = Eigen::VectorXd::Zero(len);
        for (Eigen::Index k = 0; k < len && k < static_cast<Eigen::Index>(carry.size()); ++k) {
            running[k] = carry[static_cast<std::size_t>(k)];
        }

        const SchedulePlan plan = solve_window(est, backlog, sc, tau, running);
        const double arrived = sc.load_kw[tau];
        const double available = backlog + arrived;
        const double executed = std::min({plan.alloc[0], available, std::max(capacity - running[0], 0.0)});
        backlog = available - executed;

        const double phi_true = brown_energy(executed, running[0], sc.renewable_kw[tau]);
        result.emissions_kg += phi_true * sc.carbon_intensity;
        result.total_arrived += arrived;
        result.total_executed += executed;

        if (!carry.empty()) {
            carry.erase(carry.begin());
            carry.push_back(0.0);
            for (auto& c : carry) c += executed;
        }

        SimStepLog entry;
        entry.tau = tau;
        entry.committed = executed;
        entry.backlog = backlog;
        entry.phi_true = phi_true;
        entry.emissions_cum = result.emissions_kg;
        entry.machine_kw = pack_machines(executed, cfg, cfg.strategy);
        result.log.push_back(std::move(entry));
    }
    result.final_backlog = backlog;
    return result;
}

EnergyScenario make_solar_scenario(int days, std::uint64_t seed) {
    if (days < 1) throw InvalidSpec("need at least one day");
    const int n = 24 * days;
    Rng rng(seed);
    EnergyScenario sc;
    sc.renewable_kw.resize(n);
    sc.load_kw.resize(n);
    sc.price.resize(n);
    sc.gamma = 0.95;
    sc.window_n = 8;
    sc.carbon_intensity = 0.4;
    for (int t = 0; t < n; ++t) {
        const int h = t % 24;
        // Daylight hump between 06:00 and 18:00, cloud noise on top.
        double sun = 0.0;
        if (h >= 6 && h <= 18) sun = 120.0 * std::sin(M_PI * (h - 6) / 12.0);
        sc.renewable_kw[t] = std::max(sun + 12.0 * rng.normal(), 0.0);
        // Base load with an evening peak.
        const double peak = 40.0 * std::exp(-0.5 * (h - 19.0) * (h - 19.0) / 4.0);
        sc.load_kw[t] = std::max(20.0 + peak + 3.0 * rng.normal(), 0.0);
        // Flat tariff: with gamma < 1 deferral then undercuts every brown
        // slot, so work runs only inside renewable headroom and emissions
        // isolate forecast quality.
        sc.price[t] = 0.2;
    }
    return sc;
}

EnergyScenario read_energy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,renewable_kw,load_kw,price") {
        throw ParseError(path + ":1: expected header t,renewable_kw,load_kw,price");
    }
    std::vector<double> re, load, price;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 4) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
        }
        try {
            std::size_t used = 0;
            re.push_back(std::stod(cells[1], &used));
            load.push_back(std::stod(cells[2], &used));
            price.push_back(std::stod(cells[3], &used));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    if (re.empty()) throw ParseError(path + ": no data rows");
    EnergyScenario sc;
    sc.renewable_kw = Eigen::Map<Eigen::VectorXd>(re.data(), static_cast<Eigen::Index>(re.size()));
    sc.load_kw = Eigen::Map<Eigen::VectorXd>(load.data(), static_cast<Eigen::Index>(load.size()));
    sc.price = Eigen::Map<Eigen::VectorXd>(price.data(), static_cast<Eigen::Index>(price.size()));
    return sc;
}

void write_energy_csv(const EnergyScenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "t,renewable_kw,load_kw,price\n";
    for (Eigen::Index t = 0; t < sc.size(); ++t) {
        out << t << ',' << fmt(sc.renewable_kw[t]) << ',' << fmt(sc.load_kw[t]) << ','
            << fmt(sc.price[t]) << '\n';
    }
}

std::string schedule_log_csv(const SimResult& result) {
    std::ostringstream out;
    out << "tau,committed,backlog,phi_true,emissions_cum\n";
    for (const auto& entry : result.log) {
        out << entry.tau << ',' << fmt(entry.committed) << ',' << fmt(entry.backlog) << ','
            << fmt(entry.phi_true) << ',' << fmt(entry.emissions_cum) << '\n';
    }
    return out.str();
}

std::string emissions_json(const SimResult& result, const SimConfig& cfg) {
    json doc;
    doc["forecaster"] = forecaster_name(cfg.forecaster);
    doc["strategy"] = strategy_name(cfg.strategy);
    doc["lambda_risk"] = cfg.lambda_risk;
    doc["alpha"] = cfg.alpha;
    doc["emissions_kg"] = result.emissions_kg;
    doc["total_arrived_kwh"] = result.total_arrived;
    doc["total_executed_kwh"] = result.total_executed;
    doc["final_backlog_kwh"] = result.final_backlog;
    doc["sim_start"] = result.sim_start;
    doc["steps"] = result.log.size();
    return doc.dump(2);
}

void write_sim_outputs(const SimResult& result, const SimConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/emissions.json");
        out << emissions_json(result, cfg) << "\n";
    }
    {
        std::ofstream out(out_dir + "/schedule_log.csv");
        out << schedule_log_csv(result);
    }
}

}  // namespace dscp
