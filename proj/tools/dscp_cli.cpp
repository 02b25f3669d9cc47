// Command-line front end: synthetic data generation, calibration bundles,
// one-shot prediction, benchmark evaluation, horizon sweeps, and the
// carbon-aware scheduling simulation.

#include "dscp/bench.hpp"
#include "dscp/csv.hpp"
#include "dscp/sched.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;

struct SynthArgs {
    std::string kind = "periodic_heteroscedastic";
    std::string out;
    std::string labels;
    dscp::ScenarioSpec spec;
};

int run_synth(SynthArgs& args) {
    args.spec.kind = dscp::scenario_kind_from_name(args.kind);
    const dscp::SynthResult result = dscp::generate(args.spec);
    dscp::write_series_csv(result.frame, args.out);
    const std::string labels_path = args.labels.empty() ? args.out + ".labels.json" : args.labels;
    json doc;
    doc["scenario"] = args.kind;
    doc["seed"] = args.spec.seed;
    doc["signal"] = std::vector<double>(result.signal.data(), result.signal.data() + result.signal.size());
    doc["noise_sigma"] =
        std::vector<double>(result.noise_sigma.data(), result.noise_sigma.data() + result.noise_sigma.size());
    doc["regime"] = result.regime;
    std::ofstream out(labels_path);
    out << doc.dump(2) << "\n";
    std::cout << "wrote " << args.out << " and " << labels_path << "\n";
    return 0;
}

json predictor_to_json(const dscp::Predictor& pred) {
    json doc;
    doc["kind"] = pred.spec.kind == dscp::PredictorKind::seasonal_naive ? "seasonal_naive" : "linear_ar";
    doc["period"] = pred.spec.period;
    doc["order"] = pred.spec.order;
    doc["ridge"] = pred.spec.ridge;
    doc["input_len"] = pred.input_len;
    doc["horizon"] = pred.horizon;
    doc["coef"] = std::vector<double>(pred.coef.data(), pred.coef.data() + pred.coef.size());
    return doc;
}

dscp::Predictor predictor_from_json(const json& doc) {
    dscp::Predictor pred;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "seasonal_naive") pred.spec.kind = dscp::PredictorKind::seasonal_naive;
    else if (kind == "linear_ar") pred.spec.kind = dscp::PredictorKind::linear_ar;
    else throw dscp::ParseError("unknown predictor kind '" + kind + "'");
    pred.spec.period = doc.at("period").get<int>();
    pred.spec.order = doc.at("order").get<int>();
    pred.spec.ridge = doc.at("ridge").get<double>();
    pred.input_len = doc.at("input_len").get<int>();
    pred.horizon = doc.at("horizon").get<int>();
    const auto coef = doc.at("coef").get<std::vector<double>>();
    pred.coef = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
    return pred;
}

int run_calibrate(const std::string& config_path, const std::string& data_override,
                  const std::string& out_path) {
    dscp::RunConfig cfg = dscp::load_run_config(config_path);
    if (!data_override.empty()) {
        cfg.data_path = data_override;
        cfg.scenario.reset();
    }
    cfg.validate();
    const dscp::SeriesFrame frame =
        cfg.data_path ? dscp::read_series_csv(*cfg.data_path) : dscp::generate(*cfg.scenario).frame;
    const auto parts = dscp::split_frame(frame, cfg.split);
    const dscp::Predictor pred = dscp::fit(cfg.predictor, parts[0], cfg.a, cfg.b);

    dscp::StoreConfig scfg;
    scfg.theta = cfg.theta;
    scfg.n_max = cfg.n_max;
    scfg.gamma_dtw = cfg.gamma_dtw;
    scfg.alpha_default = cfg.alphas.front();
    scfg.seed = cfg.seed;
    const dscp::CalibrationStore store = dscp::dscp_calibrate(pred, parts[1], scfg, cfg.a, cfg.b);

    json doc;
    doc["predictor"] = predictor_to_json(pred);
    doc["store"] = json::parse(dscp::store_to_json(store));
    std::ofstream out(out_path);
    if (!out) throw dscp::ParseError("cannot open '" + out_path + "' for writing");
    out << doc.dump(2) << "\n";
    std::cout << "wrote " << out_path << " (" << store.clusters.size() << " clusters, "
              << store.total_records() << " windows)\n";
    return 0;
}

int run_predict(const std::string& bundle_path, const std::string& data_path, double alpha,
                const std::string& out_path) {
    std::ifstream in(bundle_path);
    if (!in) throw dscp::ParseError("cannot open '" + bundle_path + "'");
    json doc = json::parse(in);
    const dscp::Predictor pred = predictor_from_json(doc.at("predictor"));
    const dscp::CalibrationStore store = dscp::store_from_json(doc.at("store").dump());

    const dscp::SeriesFrame frame = dscp::read_series_csv(data_path);
    if (frame.size() < pred.input_len) throw dscp::TooShort("series shorter than the predictor input");
    const Eigen::VectorXd input = frame.target.tail(pred.input_len);
    const dscp::ForecastWindow window = dscp::predict(pred, input, frame.size() - 1);
    const dscp::IntervalSeries iv =
        dscp::dscp_predict(store, window, alpha, dscp::QuantileMode::conservative);

    std::ostringstream csv;
    csv << "anchor,step,lower,pred,upper\n";
    for (Eigen::Index j = 0; j < iv.horizon(); ++j) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%lld,%lld,%.10g,%.10g,%.10g\n",
                      static_cast<long long>(iv.anchor), static_cast<long long>(j + 1), iv.lower[j],
                      iv.pred[j], iv.upper[j]);
        csv << buf;
    }
    if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
    } else {
        std::ofstream out(out_path);
        out << csv.str();
        std::cout << "wrote " << out_path << (iv.pooled_fallback ? " (pooled fallback)" : "") << "\n";
    }
    return 0;
}

int run_evaluate(const std::string& config_path) {
    const dscp::RunConfig cfg = dscp::load_run_config(config_path);
    std::filesystem::create_directories(cfg.out_dir);
    // Stream report rows so an aborted run still leaves the finished ones.
    std::ofstream report(cfg.out_dir + "/report.csv");
    report << dscp::report_csv_header() << "\n" << std::flush;
    std::cout << dscp::report_csv_header() << "\n";
    const dscp::BenchmarkResult result = dscp::run_benchmark(cfg, [&report](const dscp::EvalReport& r) {
        report << dscp::report_csv_row(r) << "\n" << std::flush;
        std::cout << dscp::report_csv_row(r) << "\n";
    });
    report.close();
    {
        std::ofstream out(cfg.out_dir + "/report.json");
        out << dscp::report_json(result.reports) << "\n";
    }
    {
        std::ofstream out(cfg.out_dir + "/intervals.csv");
        out << dscp::intervals_csv(result.intervals);
    }
    std::cout << "wrote " << cfg.out_dir << "/report.csv, report.json, intervals.csv\n";
    return 0;
}

int run_sweep(const std::string& config_path, std::vector<int>& horizons) {
    const dscp::RunConfig cfg = dscp::load_run_config(config_path);
    const auto rows = dscp::sensitivity_sweep(cfg, horizons);
    std::filesystem::create_directories(cfg.out_dir);
    const std::string csv = dscp::sweep_csv(rows);
    std::ofstream out(cfg.out_dir + "/sweep.csv");
    out << csv;
    std::cout << csv << "wrote " << cfg.out_dir << "/sweep.csv\n";
    return 0;
}

struct SimArgs {
    std::string scenario_csv;
    int bundled_days = 0;
    std::string forecaster = "dscp";
    std::string strategy = "first_fit";
    dscp::SimConfig cfg;
    double gamma = 0.95;
    int window_n = 8;
    double carbon_intensity = 0.4;
    std::string out_dir = "out";
};

int run_simulate(SimArgs& args) {
    dscp::EnergyScenario sc;
    if (!args.scenario_csv.empty()) {
        sc = dscp::read_energy_csv(args.scenario_csv);
    } else if (args.bundled_days > 0) {
        sc = dscp::make_solar_scenario(args.bundled_days, args.cfg.seed);
    } else {
        throw dscp::InvalidSpec("pass --scenario CSV or --bundled-days N");
    }
    sc.gamma = args.gamma;
    sc.window_n = args.window_n;
    sc.carbon_intensity = args.carbon_intensity;
    args.cfg.forecaster = dscp::forecaster_from_name(args.forecaster);
    args.cfg.strategy = dscp::strategy_from_name(args.strategy);

    const dscp::SimResult result = dscp::simulate(sc, args.cfg);
    dscp::write_sim_outputs(result, args.cfg, args.out_dir);
    std::cout << dscp::emissions_json(result, args.cfg) << "\n";
    std::cout << "wrote " << args.out_dir << "/emissions.json, schedule_log.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-splitting conformal prediction toolkit"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic series CSV plus label sidecar");
    synth_cmd->add_option("--scenario", synth.kind,
                          "periodic_heteroscedastic|two_regime|variance_shift|exchangeable_ar1");
    synth_cmd->add_option("--out", synth.out, "output CSV path")->required();
    synth_cmd->add_option("--labels", synth.labels, "sidecar JSON path (default <out>.labels.json)");
    synth_cmd->add_option("--length", synth.spec.length);
    synth_cmd->add_option("--seed", synth.spec.seed);
    synth_cmd->add_option("--period", synth.spec.period);
    synth_cmd->add_option("--amplitude", synth.spec.amplitude);
    synth_cmd->add_option("--sigma-high", synth.spec.sigma_high);
    synth_cmd->add_option("--sigma-low", synth.spec.sigma_low);
    synth_cmd->add_option("--amp-high", synth.spec.amp_high);
    synth_cmd->add_option("--amp-low", synth.spec.amp_low);
    synth_cmd->add_option("--block", synth.spec.block);
    synth_cmd->add_option("--shift-point", synth.spec.shift_point);
    synth_cmd->add_option("--phi", synth.spec.phi);
    synth_cmd->add_option("--sigma", synth.spec.sigma);

    std::string cal_config, cal_data, cal_out = "bundle.json";
    auto* cal_cmd = app.add_subcommand("calibrate", "fit a predictor and build a calibration bundle");
    cal_cmd->add_option("--config", cal_config, "run config JSON")->required();
    cal_cmd->add_option("--data", cal_data, "series CSV (overrides the config's data/scenario)");
    cal_cmd->add_option("--out", cal_out, "bundle JSON path");

    std::string pred_bundle, pred_data, pred_out;
    double pred_alpha = 0.1;
    auto* pred_cmd = app.add_subcommand("predict", "forecast intervals from the end of a series");
    pred_cmd->add_option("--bundle", pred_bundle, "bundle JSON from calibrate")->required();
    pred_cmd->add_option("--data", pred_data, "series CSV providing the model input")->required();
    pred_cmd->add_option("--alpha", pred_alpha, "miscoverage level");
    pred_cmd->add_option("--out", pred_out, "output CSV (default stdout)");

    std::string eval_config;
    auto* eval_cmd = app.add_subcommand("evaluate", "run the benchmark described by a config");
    eval_cmd->add_option("--config", eval_config, "run config JSON")->required();

    std::string sweep_config;
    std::vector<int> sweep_horizons;
    auto* sweep_cmd = app.add_subcommand("sweep", "rerun the benchmark across horizons");
    sweep_cmd->add_option("--config", sweep_config, "run config JSON")->required();
    sweep_cmd->add_option("--horizons", sweep_horizons, "horizons b to sweep")->required();

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "carbon-aware rolling-horizon scheduling");
    sim_cmd->add_option("--scenario", sim.scenario_csv, "scenario CSV (t,renewable_kw,load_kw,price)");
    sim_cmd->add_option("--bundled-days", sim.bundled_days, "use the bundled solar scenario");
    sim_cmd->add_option("--forecaster", sim.forecaster, "perfect|none_cp|dscp");
    sim_cmd->add_option("--strategy", sim.strategy, "first_fit|round_robin");
    sim_cmd->add_option("--lambda-risk", sim.cfg.lambda_risk);
    sim_cmd->add_option("--alpha", sim.cfg.alpha);
    sim_cmd->add_option("--window-n", sim.window_n);
    sim_cmd->add_option("--gamma", sim.gamma);
    sim_cmd->add_option("--carbon-intensity", sim.carbon_intensity);
    sim_cmd->add_option("--task-duration", sim.cfg.task_duration);
    sim_cmd->add_option("--machines", sim.cfg.machines);
    sim_cmd->add_option("--machine-cap", sim.cfg.machine_cap_kw);
    sim_cmd->add_option("--input-len", sim.cfg.a);
    sim_cmd->add_option("--period", sim.cfg.period);
    sim_cmd->add_option("--theta", sim.cfg.theta);
    sim_cmd->add_option("--n-max", sim.cfg.n_max);
    sim_cmd->add_option("--gamma-dtw", sim.cfg.gamma_dtw);
    sim_cmd->add_option("--seed", sim.cfg.seed);
    sim_cmd->add_option("--out-dir", sim.out_dir);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*cal_cmd) return run_calibrate(cal_config, cal_data, cal_out);
        if (*pred_cmd) return run_predict(pred_bundle, pred_data, pred_alpha, pred_out);
        if (*eval_cmd) return run_evaluate(eval_config);
        if (*sweep_cmd) return run_sweep(sweep_config, sweep_horizons);
        if (*sim_cmd) return run_simulate(sim);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
