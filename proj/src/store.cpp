#include "dscp/store.hpp"

#include <json.hpp>

#include <fstream>

namespace dscp {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

}  // namespace

std::size_t CalibrationStore::total_records() const {
    std::size_t n = 0;
    for (const auto& c : clusters) n += c.windows.size();
    return n;
}

std::vector<double> CalibrationStore::pooled_errors() const {
    std::vector<double> pool;
    for (const auto& c : clusters)
        for (const auto& e : c.errors)
            for (Eigen::Index j = 0; j < e.size(); ++j) pool.push_back(e[j]);
    return pool;
}

std::string store_to_json(const CalibrationStore& store) {
    json doc;
    doc["schema_version"] = store.schema_version;
    doc["horizon"] = store.horizon;
    doc["config"] = {
        {"theta", store.config.theta},
        {"n_max", store.config.n_max},
        {"gamma_dtw", store.config.gamma_dtw},
        {"alpha_default", store.config.alpha_default},
        {"seed", store.config.seed},
    };
    doc["smallest_cluster_size"] = store.smallest_cluster_size;
    json clusters = json::array();
    for (const auto& c : store.clusters) {
        json jc;
        jc["centroid"] = vec_to_json(c.centroid);
        json windows = json::array();
        for (const auto& w : c.windows) {
            windows.push_back({{"anchor", w.anchor}, {"values", vec_to_json(w.values)}});
        }
        jc["windows"] = std::move(windows);
        json errors = json::array();
        for (const auto& e : c.errors) errors.push_back(vec_to_json(e));
        jc["errors"] = std::move(errors);
        json ranges = json::array();
        for (const auto& r : c.merged.ranges) ranges.push_back({r.first, r.second});
        json sets = json::array();
        for (const auto& s : c.merged.range_sets) sets.push_back(s);
        jc["merged"] = {{"ranges", std::move(ranges)}, {"sets", std::move(sets)}};
        clusters.push_back(std::move(jc));
    }
    doc["clusters"] = std::move(clusters);
    return doc.dump(2);
}

CalibrationStore store_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad store document: ") + e.what());
    }
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != 1) {
            throw ParseError("unsupported store schema_version " + std::to_string(version));
        }
        CalibrationStore store;
        store.schema_version = version;
        store.horizon = doc.at("horizon").get<int>();
        const auto& cfg = doc.at("config");
        store.config.theta = cfg.at("theta").get<double>();
        store.config.n_max = cfg.at("n_max").get<int>();
        store.config.gamma_dtw = cfg.at("gamma_dtw").get<double>();
        store.config.alpha_default = cfg.at("alpha_default").get<double>();
        store.config.seed = cfg.at("seed").get<std::uint64_t>();
        store.smallest_cluster_size = doc.at("smallest_cluster_size").get<std::size_t>();
        for (const auto& jc : doc.at("clusters")) {
            ClusterEntry c;
            c.centroid = vec_from_json(jc.at("centroid"));
            for (const auto& jw : jc.at("windows")) {
                ForecastWindow w;
                w.anchor = jw.at("anchor").get<std::int64_t>();
                w.values = vec_from_json(jw.at("values"));
                c.windows.push_back(std::move(w));
            }
            for (const auto& je : jc.at("errors")) c.errors.push_back(vec_from_json(je));
            const auto& jm = jc.at("merged");
            for (const auto& jr : jm.at("ranges")) {
                c.merged.ranges.emplace_back(jr.at(0).get<int>(), jr.at(1).get<int>());
            }
            for (const auto& js : jm.at("sets")) {
                c.merged.range_sets.push_back(js.get<std::vector<double>>());
            }
            store.clusters.push_back(std::move(c));
        }
        return store;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad store document: ") + e.what());
    }
}

void save_store(const CalibrationStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << store_to_json(store) << "\n";
}

CalibrationStore load_store(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return store_from_json(text);
}

}  // namespace dscp
