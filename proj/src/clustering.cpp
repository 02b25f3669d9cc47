#include "dscp/clustering.hpp"

#include "dscp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace dscp {

namespace {

double sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).squaredNorm();
}

// Nearest centroid, lowest index on ties.
int nearest(const Eigen::VectorXd& w, const Eigen::MatrixXd& centroids) {
    int best = 0;
    double best_d = (w - centroids.row(0).transpose()).squaredNorm();
    for (int c = 1; c < centroids.rows(); ++c) {
        const double d = (w - centroids.row(c).transpose()).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

double sse(const std::vector<Eigen::VectorXd>& windows, const std::vector<int>& labels,
           const Eigen::MatrixXd& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        total += (windows[i] - centroids.row(labels[i]).transpose()).squaredNorm();
    }
    return total;
}

Eigen::MatrixXd seed_plusplus(const std::vector<Eigen::VectorXd>& windows, int k, Rng& rng) {
    const std::size_t m = windows.size();
    const Eigen::Index dim = windows[0].size();
    Eigen::MatrixXd centroids(k, dim);
    centroids.row(0) = windows[rng.index(m)].transpose();

    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) d2[i] = sq_dist(windows[i], centroids.row(0).transpose());
    for (int c = 1; c < k; ++c) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.index(m);  // every point coincides with a chosen centroid
        } else {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            pick = m - 1;
            for (std::size_t i = 0; i < m; ++i) {
                acc += d2[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.row(c) = windows[pick].transpose();
        for (std::size_t i = 0; i < m; ++i) {
            d2[i] = std::min(d2[i], sq_dist(windows[i], centroids.row(c).transpose()));
        }
    }
    return centroids;
}

}  // namespace

ClusterModel kmeans(const std::vector<Eigen::VectorXd>& windows, int k, std::uint64_t seed) {
    const std::size_t m = windows.size();
    if (k < 1) throw InvalidSpec("k must be at least 1");
    if (m < static_cast<std::size_t>(k)) {
        throw TooFewWindows(std::to_string(m) + " windows cannot form " + std::to_string(k) +
                            " clusters");
    }
    const Eigen::Index dim = windows[0].size();
    for (const auto& w : windows) {
        if (w.size() != dim) throw ShapeMismatch("windows disagree on horizon");
    }

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.centroids = seed_plusplus(windows, k, rng);
    model.labels.resize(m);
    for (std::size_t i = 0; i < m; ++i) model.labels[i] = nearest(windows[i], model.centroids);
    model.sse_trace.push_back(sse(windows, model.labels, model.centroids));

    for (int iter = 0; iter < 300; ++iter) {
        // Centroid update: means of the current members.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < m; ++i) {
            sums.row(model.labels[i]) += windows[i].transpose();
            ++counts[static_cast<std::size_t>(model.labels[i])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                model.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
        }
        // Empty clusters grab the point farthest from its own centroid; that
        // point's distance drops to zero, so the objective cannot rise.
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            double worst = -1.0;
            std::size_t pick = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (counts[static_cast<std::size_t>(model.labels[i])] <= 1) continue;
                const double d = sq_dist(windows[i], model.centroids.row(model.labels[i]).transpose());
                if (d > worst) {
                    worst = d;
                    pick = i;
                }
            }
            if (worst < 0.0) continue;  // nothing stealable; leave the cluster empty
            --counts[static_cast<std::size_t>(model.labels[pick])];
            model.centroids.row(c) = windows[pick].transpose();
            model.labels[pick] = c;
            counts[static_cast<std::size_t>(c)] = 1;
        }

        bool changed = false;
        for (std::size_t i = 0; i < m; ++i) {
            const int l = nearest(windows[i], model.centroids);
            if (l != model.labels[i]) {
                model.labels[i] = l;
                changed = true;
            }
        }
        model.sse_trace.push_back(sse(windows, model.labels, model.centroids));
        if (!changed) break;
    }

    // Coincident inputs can defeat the empty-cluster repair and collapse the
    // labeling to one class; silhouette is undefined there, score it 0.
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (int l : model.labels) seen[static_cast<std::size_t>(l)] = 1;
    int occupied = 0;
    for (char flag : seen) occupied += flag;
    model.silhouette = (k >= 2 && occupied >= 2) ? silhouette_score(windows, model.labels) : 0.0;
    return model;
}

double silhouette_score(const std::vector<Eigen::VectorXd>& windows, const std::vector<int>& labels) {
    const std::size_t m = windows.size();
    if (labels.size() != m) throw ShapeMismatch("labels do not match windows");
    if (m == 0) throw TooFewWindows("no windows");
    int k = 0;
    for (int l : labels) {
        if (l < 0) throw InvalidSpec("negative cluster label");
        k = std::max(k, l + 1);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[static_cast<std::size_t>(l)];
    std::size_t nonempty = 0;
    for (auto c : counts) nonempty += c > 0 ? 1 : 0;
    if (nonempty < 2) throw SingleCluster("silhouette needs at least two non-empty clusters");

    double total = 0.0;
    std::vector<double> sums(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t own = static_cast<std::size_t>(labels[i]);
        if (counts[own] == 1) continue;  // singleton contributes 0
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            sums[static_cast<std::size_t>(labels[j])] += std::sqrt(sq_dist(windows[i], windows[j]));
        }
        const double a = sums[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (c == own || counts[c] == 0) continue;
            b = std::min(b, sums[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;  // 0/0 -> 0
    }
    return total / static_cast<double>(m);
}

ClusterModel self_cluster(const std::vector<Eigen::VectorXd>& windows, int n_max, std::uint64_t seed) {
    const std::size_t m = windows.size();
    if (m < 2) throw TooFewWindows("self_cluster needs at least 2 windows");
    if (n_max < 2) throw InvalidSpec("N must be at least 2");
    if (m < 4) {
        // Too few points for silhouette to mean anything: one trivial cluster.
        ClusterModel model = kmeans(windows, 1, seed);
        model.silhouette = 0.0;
        return model;
    }
    const int k_hi = std::min<std::size_t>(static_cast<std::size_t>(n_max), m);
    ClusterModel best;
    bool have = false;
    for (int k = 2; k <= k_hi; ++k) {
        // Independent seed per k so candidates can be evaluated in any order.
        ClusterModel cand = kmeans(windows, k, seed + static_cast<std::uint64_t>(k));
        if (!have || cand.silhouette > best.silhouette) {
            best = std::move(cand);
            have = true;
        }
    }
    return best;
}

double soft_dtw(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double gamma) {
    if (x.size() == 0 || y.size() == 0) throw EmptySequence("soft_dtw needs nonempty sequences");
    if (!(gamma > 0.0)) throw InvalidSpec("gamma_dtw must be positive");
    const Eigen::Index nx = x.size(), ny = y.size();
    const double inf = std::numeric_limits<double>::infinity();

    auto softmin = [gamma](double a, double b, double c) {
        const double m = std::min(a, std::min(b, c));
        if (!std::isfinite(m)) return m;
        double s = 0.0;
        if (std::isfinite(a)) s += std::exp(-(a - m) / gamma);
        if (std::isfinite(b)) s += std::exp(-(b - m) / gamma);
        if (std::isfinite(c)) s += std::exp(-(c - m) / gamma);
        return m - gamma * std::log(s);
    };

    // One rolling row; border cells use +inf neighbors.
    std::vector<double> prev(static_cast<std::size_t>(ny) + 1, inf), curr(prev);
    prev[0] = 0.0;
    for (Eigen::Index i = 1; i <= nx; ++i) {
        curr[0] = inf;
        for (Eigen::Index j = 1; j <= ny; ++j) {
            const double cost = (x[i - 1] - y[j - 1]) * (x[i - 1] - y[j - 1]);
            curr[static_cast<std::size_t>(j)] =
                cost + softmin(prev[static_cast<std::size_t>(j - 1)], prev[static_cast<std::size_t>(j)],
                               curr[static_cast<std::size_t>(j - 1)]);
        }
        std::swap(prev, curr);
    }
    return prev[static_cast<std::size_t>(ny)];
}

int assign_cluster(const ForecastWindow& window, const CalibrationStore& store) {
    if (window.values.size() != store.horizon) {
        throw HorizonMismatch("window horizon " + std::to_string(window.values.size()) +
                              " vs store horizon " + std::to_string(store.horizon));
    }
    struct Scored {
        double similarity;
        std::int64_t anchor;
        int cluster;
    };
    std::vector<Scored> scored;
    scored.reserve(store.total_records());
    for (std::size_t c = 0; c < store.clusters.size(); ++c) {
        for (const auto& w : store.clusters[c].windows) {
            scored.push_back({-soft_dtw(window.values, w.values, store.config.gamma_dtw), w.anchor,
                              static_cast<int>(c)});
        }
    }
    if (scored.empty()) throw EmptyCluster("store has no historical windows");

    std::size_t s = std::min(store.smallest_cluster_size, scored.size());
    if (s == 0) s = scored.size();
    // Most similar first; equal similarity at the cut keeps the earlier anchor.
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.anchor < b.anchor;
    });

    std::vector<std::size_t> votes(store.clusters.size(), 0);
    for (std::size_t i = 0; i < s; ++i) ++votes[static_cast<std::size_t>(scored[i].cluster)];
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) best = c;  // ties keep the lowest index
    }
    return static_cast<int>(best);
}

}  // namespace dscp
