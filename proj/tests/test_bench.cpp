#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dscp/bench.hpp"
#include "dscp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

dscp::RunConfig ar1_config() {
    dscp::RunConfig cfg;
    dscp::ScenarioSpec spec;
    spec.kind = dscp::ScenarioKind::exchangeable_ar1;
    spec.length = 600;
    spec.phi = 0.5;
    spec.seed = 11;
    cfg.scenario = spec;
    cfg.split = {0.5, 0.25, 0.25};
    cfg.a = 8;
    cfg.b = 4;
    cfg.predictor.kind = dscp::PredictorKind::linear_ar;
    cfg.predictor.order = 2;
    cfg.seed = 11;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// An exactly periodic series file so every forecast is error-free.
std::string write_periodic_csv(const std::string& path) {
    dscp::SeriesFrame frame;
    const int period = 8, len = 400;
    std::vector<double> pattern(period);
    for (int i = 0; i < period; ++i) pattern[static_cast<std::size_t>(i)] = 3.0 + std::cos(0.7 * i);
    frame.timestamps.resize(len);
    frame.target.resize(len);
    for (int t = 0; t < len; ++t) {
        frame.timestamps[static_cast<std::size_t>(t)] = t;
        frame.target[t] = pattern[static_cast<std::size_t>(t % period)];
    }
    dscp::write_series_csv(frame, path);
    return path;
}

}  // namespace

TEST_CASE("split_frame cuts chronologically and keeps clocks and features") {
    dscp::SeriesFrame frame;
    const int n = 100;
    frame.timestamps.resize(n);
    frame.target.resize(n);
    frame.features.resize(n, 2);
    for (int t = 0; t < n; ++t) {
        frame.timestamps[static_cast<std::size_t>(t)] = 1000 + t;
        frame.target[t] = t;
        frame.features(t, 0) = 2.0 * t;
        frame.features(t, 1) = -t;
    }

    const auto parts = dscp::split_frame(frame, {0.5, 0.2, 0.3});
    CHECK(parts[0].size() == 50);
    CHECK(parts[1].size() == 20);
    CHECK(parts[2].size() == 30);

    CHECK(parts[0].timestamps.front() == 1000);
    CHECK(parts[1].timestamps.front() == 1050);
    CHECK(parts[2].timestamps.front() == 1070);
    CHECK(parts[2].timestamps.back() == 1099);

    // Values and features stay aligned with their original steps.
    CHECK(parts[1].target[0] == 50.0);
    CHECK(parts[1].features(0, 0) == 100.0);
    CHECK(parts[2].features(29, 1) == -99.0);

    // No step is lost or duplicated across the three parts.
    CHECK(parts[0].size() + parts[1].size() + parts[2].size() == n);
}

TEST_CASE("split_frame rejects bad fractions and too-short series") {
    dscp::SeriesFrame frame;
    frame.timestamps = {0, 1, 2, 3};
    frame.target = Eigen::VectorXd::Zero(4);

    CHECK_THROWS_AS(dscp::split_frame(frame, {0.5, 0.5, 0.5}), dscp::InvalidSpec);
    CHECK_THROWS_AS(dscp::split_frame(frame, {0.7, -0.1, 0.4}), dscp::InvalidSpec);
    CHECK_THROWS_AS(dscp::split_frame(frame, {0.9, 0.05, 0.05}), dscp::TooShort);
}

TEST_CASE("run_benchmark emits one report per method and alpha in config order") {
    auto cfg = ar1_config();
    cfg.methods = {dscp::Method::cp, dscp::Method::dscp};
    cfg.alphas = {0.05, 0.1, 0.15};
    const auto result = dscp::run_benchmark(cfg);

    REQUIRE(result.reports.size() == 6);
    const char* want_method[] = {"cp", "cp", "cp", "dscp", "dscp", "dscp"};
    const double want_alpha[] = {0.05, 0.1, 0.15, 0.05, 0.1, 0.15};
    for (int i = 0; i < 6; ++i) {
        CHECK(result.reports[static_cast<std::size_t>(i)].method == want_method[i]);
        CHECK(result.reports[static_cast<std::size_t>(i)].alpha == want_alpha[i]);
    }

    // Every pass walks the same test windows.
    const auto n_windows = result.reports[0].n_windows;
    CHECK(n_windows > 0);
    for (const auto& r : result.reports) {
        CHECK(r.n_windows == n_windows);
        CHECK(r.n_points == n_windows * 4);
    }
    CHECK(result.intervals.size() == 6 * n_windows * 4);
}

TEST_CASE("run_benchmark on a noiseless series collapses every method") {
    const auto path = write_periodic_csv("/tmp/dscp_bench_periodic.csv");
    dscp::RunConfig cfg;
    cfg.data_path = path;
    cfg.split = {0.5, 0.25, 0.25};
    cfg.a = 8;
    cfg.b = 3;
    cfg.predictor.kind = dscp::PredictorKind::seasonal_naive;
    cfg.predictor.period = 8;
    cfg.methods = {dscp::Method::dscp, dscp::Method::cp, dscp::Method::enbpi_style, dscp::Method::aci,
                   dscp::Method::per_step_cp};
    cfg.alphas = {0.1};
    const auto result = dscp::run_benchmark(cfg);

    REQUIRE(result.reports.size() == 5);
    for (const auto& r : result.reports) {
        // Zero-width bands that always cover: the gap pins at +100 * alpha.
        CHECK(r.pi_width == 0.0);
        CHECK(r.delta_cov == doctest::Approx(10.0).epsilon(1e-9));
        CHECK(r.winkler == 0.0);
    }
    for (const auto& row : result.intervals) {
        CHECK(row.lower == row.pred);
        CHECK(row.upper == row.pred);
        CHECK(row.truth == row.pred);
    }
    std::remove(path.c_str());
}

TEST_CASE("run_benchmark is deterministic end to end") {
    const auto cfg = ar1_config();
    const auto a = dscp::run_benchmark(cfg);
    const auto b = dscp::run_benchmark(cfg);

    CHECK(dscp::intervals_csv(a.intervals) == dscp::intervals_csv(b.intervals));
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
        CHECK(a.reports[i].delta_cov == b.reports[i].delta_cov);
        CHECK(a.reports[i].pi_width == b.reports[i].pi_width);
        CHECK(a.reports[i].winkler == b.reports[i].winkler);
    }
}

TEST_CASE("run_benchmark streams reports as passes finish") {
    auto cfg = ar1_config();
    cfg.methods = {dscp::Method::cp, dscp::Method::per_step_cp};
    cfg.alphas = {0.1, 0.2};
    std::vector<std::string> seen;
    const auto result = dscp::run_benchmark(cfg, [&seen](const dscp::EvalReport& r) {
        seen.push_back(r.method + "@" + std::to_string(r.alpha).substr(0, 3));
    });
    REQUIRE(seen.size() == result.reports.size());
    CHECK(seen[0] == "cp@0.1");
    CHECK(seen[3] == "per_step_cp@0.2");
}

TEST_CASE("updating methods adapt to a variance shift that static cp misses") {
    dscp::RunConfig cfg;
    dscp::ScenarioSpec spec;
    spec.kind = dscp::ScenarioKind::variance_shift;
    spec.length = 2000;
    spec.sigma_low = 0.5;
    spec.sigma_high = 3.0;
    spec.shift_point = 1600;  // the shift lands inside the test segment
    spec.seed = 21;
    cfg.scenario = spec;
    cfg.split = {0.5, 0.25, 0.25};
    cfg.a = 8;
    cfg.b = 1;
    cfg.predictor.kind = dscp::PredictorKind::linear_ar;
    cfg.predictor.order = 1;
    cfg.methods = {dscp::Method::cp, dscp::Method::enbpi_style, dscp::Method::aci};
    cfg.alphas = {0.1};
    cfg.enbpi_capacity = 100;
    cfg.gamma_aci = 0.05;
    cfg.seed = 21;

    const auto result = dscp::run_benchmark(cfg);
    REQUIRE(result.reports.size() == 3);
    const auto& cp = result.reports[0];
    const auto& enbpi = result.reports[1];
    const auto& aci = result.reports[2];

    // Calibrated on quiet data, plain cp undercovers once the noise triples;
    // the feedback methods claw coverage back.
    CHECK(cp.delta_cov < -5.0);
    CHECK(enbpi.delta_cov > cp.delta_cov + 3.0);
    CHECK(aci.delta_cov > cp.delta_cov + 3.0);
}

TEST_CASE("dscp reclustering path stays deterministic and well-formed") {
    auto cfg = ar1_config();
    cfg.methods = {dscp::Method::dscp};
    cfg.recluster_every = 5;
    const auto a = dscp::run_benchmark(cfg);
    const auto b = dscp::run_benchmark(cfg);
    CHECK(dscp::intervals_csv(a.intervals) == dscp::intervals_csv(b.intervals));
    REQUIRE(a.reports.size() == 1);
    CHECK(a.reports[0].n_points == a.reports[0].n_windows * 4);
    for (const auto& row : a.intervals) CHECK(row.lower <= row.upper);
}

TEST_CASE("sensitivity_sweep matches single runs and blocks rows by horizon") {
    auto cfg = ar1_config();
    cfg.methods = {dscp::Method::cp};
    cfg.alphas = {0.1};

    const auto rows = dscp::sensitivity_sweep(cfg, {2, 4, 6});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].b == 2);
    CHECK(rows[1].b == 4);
    CHECK(rows[2].b == 6);

    auto solo = cfg;
    solo.b = 4;
    const auto direct = dscp::run_benchmark(solo);
    CHECK(rows[1].report.delta_cov == direct.reports[0].delta_cov);
    CHECK(rows[1].report.pi_width == direct.reports[0].pi_width);
    CHECK(rows[1].report.winkler == direct.reports[0].winkler);

    CHECK_THROWS_AS(dscp::sensitivity_sweep(cfg, {}), dscp::InvalidSpec);
}

TEST_CASE("csv renderings use the pinned headers and formats") {
    dscp::IntervalRow row;
    row.method = "cp";
    row.alpha = 0.1;
    row.anchor = 42;
    row.step = 3;
    row.lower = -1.25;
    row.pred = 0.5;
    row.upper = 2.25;
    row.truth = 0.75;
    const auto text = dscp::intervals_csv({row});
    CHECK(text == "method,alpha,anchor,step,lower,pred,upper,truth\ncp,0.1,42,3,-1.25,0.5,2.25,0.75\n");

    dscp::SweepRow srow;
    srow.b = 6;
    srow.report.method = "dscp";
    srow.report.alpha = 0.1;
    srow.report.delta_cov = 1.5;
    srow.report.pi_width = 2.0;
    srow.report.winkler = 2.5;
    srow.report.n_windows = 10;
    srow.report.n_points = 60;
    CHECK(dscp::sweep_csv({srow}) ==
          "method,b,alpha,delta_cov,pi_width,winkler,n_windows,n_points\ndscp,6,0.1,1.5,2,2.5,10,60\n");
}

TEST_CASE("write_benchmark_outputs materializes the three artifacts") {
    auto cfg = ar1_config();
    cfg.methods = {dscp::Method::cp};
    cfg.out_dir = "/tmp/dscp_bench_out";
    std::filesystem::remove_all(cfg.out_dir);

    const auto result = dscp::run_benchmark(cfg);
    dscp::write_benchmark_outputs(cfg, result);

    const auto report_csv = slurp(cfg.out_dir + "/report.csv");
    CHECK(report_csv.rfind(dscp::report_csv_header(), 0) == 0);
    CHECK(report_csv.find("cp,0.1") != std::string::npos);

    CHECK(slurp(cfg.out_dir + "/intervals.csv") == dscp::intervals_csv(result.intervals));
    CHECK(slurp(cfg.out_dir + "/report.json").find("\"delta_cov\"") != std::string::npos);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("run_config_from_json parses a full document") {
    const std::string text = R"({
        "scenario": "two_regime",
        "length": 960,
        "block": 48,
        "amp_high": 8.0,
        "split": [0.6, 0.2, 0.2],
        "a": 12,
        "b": 6,
        "predictor": "linear_ar",
        "ar_order": 3,
        "ridge": 1e-4,
        "methods": ["dscp", "cp", "aci"],
        "alpha": [0.05, 0.1],
        "theta": 0.1,
        "gamma_aci": 0.02,
        "N_max": 4,
        "gamma_dtw": 0.5,
        "seed": 99,
        "out_dir": "/tmp/somewhere",
        "recluster_every": 10,
        "enbpi_capacity": 256,
        "interpolated_quantiles": true
    })";
    const auto cfg = dscp::run_config_from_json(text);

    REQUIRE(cfg.scenario.has_value());
    CHECK_FALSE(cfg.data_path.has_value());
    CHECK(cfg.scenario->kind == dscp::ScenarioKind::two_regime);
    CHECK(cfg.scenario->length == 960);
    CHECK(cfg.scenario->block == 48);
    CHECK(cfg.scenario->amp_high == 8.0);
    CHECK(cfg.scenario->seed == 99);  // scenario clock follows the run seed
    CHECK(cfg.split == std::array<double, 3>{0.6, 0.2, 0.2});
    CHECK(cfg.a == 12);
    CHECK(cfg.b == 6);
    CHECK(cfg.predictor.kind == dscp::PredictorKind::linear_ar);
    CHECK(cfg.predictor.order == 3);
    CHECK(cfg.predictor.ridge == 1e-4);
    REQUIRE(cfg.methods.size() == 3);
    CHECK(cfg.methods[2] == dscp::Method::aci);
    CHECK(cfg.alphas == std::vector<double>{0.05, 0.1});
    CHECK(cfg.theta == 0.1);
    CHECK(cfg.gamma_aci == 0.02);
    CHECK(cfg.n_max == 4);
    CHECK(cfg.gamma_dtw == 0.5);
    CHECK(cfg.seed == 99);
    CHECK(cfg.out_dir == "/tmp/somewhere");
    CHECK(cfg.recluster_every == 10);
    CHECK(cfg.enbpi_capacity == 256);
    CHECK(cfg.interpolated_quantiles);

    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("run_config_from_json rejects malformed documents") {
    CHECK_THROWS_AS(dscp::run_config_from_json("{nope"), dscp::ParseError);
    CHECK_THROWS_AS(dscp::run_config_from_json(R"({"scenario": "two_regime", "typo_key": 1})"),
                    dscp::InvalidSpec);
    CHECK_THROWS_AS(dscp::run_config_from_json(R"({"scenario": "nope"})"), dscp::InvalidSpec);
    CHECK_THROWS_AS(dscp::run_config_from_json(R"({"scenario": "two_regime", "split": [0.5, 0.5]})"),
                    dscp::InvalidSpec);
    CHECK_THROWS_AS(dscp::load_run_config("/nonexistent/config.json"), dscp::ParseError);
}

TEST_CASE("config validation demands exactly one data source and sane knobs") {
    dscp::RunConfig cfg = ar1_config();
    CHECK_NOTHROW(cfg.validate());

    auto both = cfg;
    both.data_path = "series.csv";
    CHECK_THROWS_AS(both.validate(), dscp::InvalidSpec);

    auto neither = cfg;
    neither.scenario.reset();
    CHECK_THROWS_AS(neither.validate(), dscp::InvalidSpec);

    auto bad = cfg;
    bad.split = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.a = 0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.b = 0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.alphas = {0.1, 1.0};
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.alphas.clear();
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.methods.clear();
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.theta = 0.0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.theta = 1.5;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.gamma_aci = 0.0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.n_max = 1;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.gamma_dtw = 0.0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.enbpi_capacity = 0;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
    bad = cfg;
    bad.recluster_every = -1;
    CHECK_THROWS_AS(bad.validate(), dscp::InvalidSpec);
}
