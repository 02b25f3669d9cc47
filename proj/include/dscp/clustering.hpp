#pragma once

#include "dscp/store.hpp"
#include "dscp/types.hpp"

#include <cstdint>
#include <vector>

namespace dscp {

/** Output of Lloyd's algorithm on raw forecast windows. */
struct ClusterModel {
    int k = 0;
    Eigen::MatrixXd centroids;  // k rows, one per cluster
    std::vector<int> labels;    // one per window, in 0..k-1
    double silhouette = 0.0;    // mean silhouette of the final labeling
    std::vector<double> sse_trace;  // objective after each Lloyd iteration

    double objective() const { return sse_trace.empty() ? 0.0 : sse_trace.back(); }
};

/**
 * Lloyd's k-means on the raw b-step vectors: k-means++ seeding from seed,
 * squared-Euclidean assignments, empty clusters repaired by reseeding to the
 * point farthest from its centroid, at most 300 iterations. Deterministic for
 * a fixed seed. A labeling that still collapses below two occupied clusters
 * (coincident inputs) scores silhouette 0. Requires 1 <= k <= windows.size();
 * throws TooFewWindows / InvalidSpec otherwise.
 */
ClusterModel kmeans(const std::vector<Eigen::VectorXd>& windows, int k, std::uint64_t seed);

/**
 * Mean silhouette over all points. Points in singleton clusters score 0, as
 * does the 0/0 case of coincident points. Requires labels to match windows.
 */
double silhouette_score(const std::vector<Eigen::VectorXd>& windows, const std::vector<int>& labels);

/**
 * Vertical classification: runs kmeans for k = 2..min(n_max, windows.size())
 * with per-k derived seeds and keeps the best mean silhouette, smallest k on
 * ties. Fewer than 4 windows collapse to the trivial k = 1 model.
 */
ClusterModel self_cluster(const std::vector<Eigen::VectorXd>& windows, int n_max, std::uint64_t seed);

/**
 * Soft dynamic time warping with squared-difference ground cost and
 * soft-min(a,b,c) = -gamma * log(sum exp(-x/gamma)), computed with the usual
 * max-shift so small gammas stay finite. gamma > 0; both sequences nonempty.
 * Recovers classical DTW as gamma -> 0 and can be slightly negative.
 */
double soft_dtw(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double gamma);

/**
 * Classifies a new window against the store: similarity -soft_dtw to every
 * stored window, majority vote over the s most similar where s is the
 * smallest cluster size. Ties at the s-boundary keep the earlier anchor;
 * vote ties pick the lowest cluster index.
 */
int assign_cluster(const ForecastWindow& window, const CalibrationStore& store);

}  // namespace dscp
