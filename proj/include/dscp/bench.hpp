#pragma once

#include "dscp/conformal.hpp"
#include "dscp/metrics.hpp"
#include "dscp/predictors.hpp"
#include "dscp/synth.hpp"
#include "dscp/types.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dscp {

/**
 * Full benchmark description, loadable from a flat JSON config. Exactly one
 * of data_path / scenario provides the series.
 */
struct RunConfig {
    std::optional<std::string> data_path;
    std::optional<ScenarioSpec> scenario;
    std::array<double, 3> split{0.7, 0.15, 0.15};  // chronological train/calib/test
    int a = 8;
    int b = 6;
    PredictorSpec predictor;
    std::vector<Method> methods{Method::dscp, Method::cp};
    std::vector<double> alphas{0.1};
    double theta = 0.05;
    double gamma_aci = 0.01;
    int n_max = 6;
    double gamma_dtw = 1.0;
    std::size_t enbpi_capacity = 512;
    int recluster_every = 0;  // 0 = never recluster during evaluation
    bool interpolated_quantiles = false;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    void validate() const;  // throws InvalidSpec on inconsistent settings
};

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

/** One emitted interval row of intervals.csv. */
struct IntervalRow {
    std::string method;
    double alpha;
    std::int64_t anchor;
    int step;  // 1-based
    double lower;
    double pred;
    double upper;
    double truth;
};

struct BenchmarkResult {
    std::vector<EvalReport> reports;
    std::vector<IntervalRow> intervals;
};

/**
 * Chronological split, one predictor fit on train, one calibration per
 * method, then a time-ordered pass over every test anchor (stride one).
 * Updating methods (enbpi_style, aci) consume each window's truth after
 * predicting it. on_report, when set, sees each report row as soon as the
 * (method, alpha) pass finishes, so partial results survive a later failure.
 */
BenchmarkResult run_benchmark(const RunConfig& cfg,
                              const std::function<void(const EvalReport&)>& on_report = nullptr);

/** Reruns run_benchmark per horizon with the same seed; rows gain the horizon column. */
struct SweepRow {
    int b;
    EvalReport report;
};
std::vector<SweepRow> sensitivity_sweep(const RunConfig& cfg, const std::vector<int>& horizons);

/** Deterministic text renderings; identical configs yield identical bytes. */
std::string intervals_csv(const std::vector<IntervalRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/** Writes report.csv, report.json and intervals.csv under cfg.out_dir. */
void write_benchmark_outputs(const RunConfig& cfg, const BenchmarkResult& result);

/** Chronological three-way split by fractions; parts keep their original clocks. */
std::array<SeriesFrame, 3> split_frame(const SeriesFrame& frame, const std::array<double, 3>& fractions);

}  // namespace dscp
