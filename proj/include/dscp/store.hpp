#pragma once

#include "dscp/error_sets.hpp"
#include "dscp/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dscp {

/** Knobs frozen into a calibration store at build time. */
struct StoreConfig {
    double theta = 0.05;      // KS merge threshold
    int n_max = 6;            // upper bound on the vertical class count
    double gamma_dtw = 1.0;   // soft-DTW smoothing for window assignment
    double alpha_default = 0.1;
    std::uint64_t seed = 0;
};

/** One vertical class: its member windows, their errors, and the merged step sets. */
struct ClusterEntry {
    Eigen::VectorXd centroid;
    std::vector<ForecastWindow> windows;
    std::vector<Eigen::VectorXd> errors;  // aligned with windows
    MergedErrorSets merged;

    std::size_t size() const { return windows.size(); }
};

/**
 * Everything dscp_predict needs, value-semantic and serializable. The
 * smallest cluster size s is the vote width used when classifying new
 * windows.
 */
struct CalibrationStore {
    int schema_version = 1;
    int horizon = 0;  // b
    StoreConfig config;
    std::vector<ClusterEntry> clusters;
    std::size_t smallest_cluster_size = 0;

    std::size_t total_records() const;
    /** Pooled signed errors across every cluster, step and record. */
    std::vector<double> pooled_errors() const;
};

/** Serializes the full store, doubles kept at round-trip precision. */
std::string store_to_json(const CalibrationStore& store);
CalibrationStore store_from_json(const std::string& text);

void save_store(const CalibrationStore& store, const std::string& path);
CalibrationStore load_store(const std::string& path);

}  // namespace dscp
