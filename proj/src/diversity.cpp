#include "decern/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "decern/error.hpp"
#include "decern/random.hpp"

namespace decern {

std::vector<std::vector<std::size_t>> WeightedClustering::members() const {
    std::vector<std::vector<std::size_t>> out(num_clusters());
    for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].push_back(i);
    return out;
}

Vector normalize_weights(std::span<const double> weights) {
    double mx = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error("weights must be finite and non-negative");
        mx = std::max(mx, w);
    }
    if (mx == 0.0) throw Error("weights are all zero");
    Vector out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out[i] = static_cast<double>(static_cast<float>(weights[i] / mx));
    }
    return out;
}

namespace {

std::size_t draw_proportional(Rng& rng, std::span<const double> mass, const std::vector<bool>& taken) {
    double total = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (!taken[i]) total += mass[i];
    }
    if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t last = mass.size();
        for (std::size_t i = 0; i < mass.size(); ++i) {
            if (taken[i] || mass[i] <= 0.0) continue;
            acc += mass[i];
            last = i;
            if (target < acc) return i;
        }
        return last;
    }
    // No mass left (duplicates or zero weights): lowest untaken index.
    for (std::size_t i = 0; i < taken.size(); ++i) {
        if (!taken[i]) return i;
    }
    throw Error("no point left to seed a cluster");
}

std::size_t nearest(const Matrix& centroids, std::span<const double> z) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.rows(); ++k) {
        const double d = squared_distance(z, centroids.row(k));
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace

Matrix kmeanspp_init(const Matrix& points, std::span<const double> weights, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows();
    if (n < k) throw InfeasibleError("insufficient candidates");
    if (weights.size() != n) throw Error("one weight per point required");
    Matrix centers(k, points.cols());
    if (k == 0) return centers;
    Rng rng(seed);
    std::vector<bool> taken(n, false);
    std::vector<double> mass(weights.begin(), weights.end());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t pick = draw_proportional(rng, mass, taken);
        taken[pick] = true;
        std::ranges::copy(points.row(pick), centers.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(pick)));
            mass[i] = weights[i] * d2[i];
        }
    }
    return centers;
}

WeightedClustering weighted_lloyd(const Matrix& points, std::span<const double> weights, Matrix initial_centroids,
                                  std::size_t max_iterations) {
    const std::size_t n = points.rows();
    const std::size_t k = initial_centroids.rows();
    const std::size_t d = points.cols();
    if (weights.size() != n) throw Error("one weight per point required");
    if (n < k) throw InfeasibleError("insufficient candidates");
    if (initial_centroids.cols() != d) throw Error("centroid dimension mismatch");

    WeightedClustering out;
    out.weights.assign(weights.begin(), weights.end());
    out.centroids = std::move(initial_centroids);
    out.assignments.assign(n, 0);
    std::vector<std::size_t> previous;
    std::vector<std::size_t> sizes(k);

    for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iterations, 1); ++iter) {
        out.iterations = iter + 1;
        std::ranges::fill(sizes, 0);
        for (std::size_t i = 0; i < n; ++i) {
            out.assignments[i] = nearest(out.centroids, points.row(i));
            ++sizes[out.assignments[i]];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t victim = n;
            double worst = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t a = out.assignments[i];
                if (sizes[a] < 2) continue;
                const double contrib = weights[i] * squared_distance(points.row(i), out.centroids.row(a));
                if (contrib > worst) {
                    worst = contrib;
                    victim = i;
                }
            }
            if (victim == n) throw Error("cannot repair empty cluster");
            --sizes[out.assignments[victim]];
            out.assignments[victim] = c;
            sizes[c] = 1;
            std::ranges::copy(points.row(victim), out.centroids.row(c).begin());
        }

        // Weighted means; a cluster whose members all weigh 0 uses the plain mean.
        Matrix sums(k, d);
        std::vector<double> mass(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = out.assignments[i];
            auto row = sums.row(a);
            const auto z = points.row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] += weights[i] * z[j];
            mass[a] += weights[i];
        }
        for (std::size_t c = 0; c < k; ++c) {
            auto centroid = out.centroids.row(c);
            if (mass[c] > 0.0) {
                const auto row = sums.row(c);
                for (std::size_t j = 0; j < d; ++j) centroid[j] = row[j] / mass[c];
                continue;
            }
            std::ranges::fill(centroid, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (out.assignments[i] != c) continue;
                const auto z = points.row(i);
                for (std::size_t j = 0; j < d; ++j) centroid[j] += z[j];
            }
            for (double& v : centroid) v /= static_cast<double>(sizes[c]);
        }

        if (out.assignments == previous) {
            out.converged = true;
            break;
        }
        previous = out.assignments;
    }
    return out;
}

WeightedClustering weighted_kmeans(const Matrix& points, std::span<const double> weights, std::size_t k,
                                   std::uint64_t seed) {
    if (points.rows() < k) throw InfeasibleError("insufficient candidates");
    if (k == 0) throw Error("cluster count must be >= 1");
    const Vector w = normalize_weights(weights);
    Matrix init = kmeanspp_init(points, w, k, seed);
    return weighted_lloyd(points, w, std::move(init));
}

double calibration_objective(std::span<const double> z, std::span<const double> centroid, const AnchorSet& anchors,
                             double xi) {
    double min_anchor = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < anchors.num_classes(); ++j) {
        if (!anchors.present[j]) continue;
        min_anchor = std::min(min_anchor, 1.0 - cosine_similarity(z, anchors.embedding(j)));
    }
    if (!std::isfinite(min_anchor)) throw Error("no anchor classes present");
    return -xi * (1.0 - cosine_similarity(z, centroid)) + (1.0 - xi) * min_anchor;
}

std::size_t first_near_max(std::span<const double> values) {
    if (values.empty()) throw Error("no values to pick from");
    const double top = *std::ranges::max_element(values);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= top - kTieTolerance) return i;
    }
    return 0;
}

SelectionResult calibration_select(const WeightedClustering& clustering, const Matrix& points,
                                   std::span<const std::size_t> candidate_ids, const AnchorSet& anchors, double xi) {
    if (!(xi >= 0.0 && xi <= 1.0)) throw Error("xi must be in [0, 1]");
    if (anchors.present_count() == 0) throw Error("no anchor classes present");
    if (candidate_ids.size() != points.rows() || clustering.assignments.size() != points.rows()) {
        throw Error("candidate count mismatch");
    }
    const auto groups = clustering.members();
    SelectionResult out;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty()) throw Error("cluster " + std::to_string(c) + " has no members");
        const auto centroid = clustering.centroids.row(c);
        std::vector<double> objective;
        objective.reserve(groups[c].size());
        for (std::size_t i : groups[c]) objective.push_back(calibration_objective(points.row(i), centroid, anchors, xi));
        const std::size_t pos = first_near_max(objective);
        const std::size_t best = groups[c][pos];
        const double best_obj = objective[pos];
        SelectionDiagnostics diag;
        diag.cluster = c;
        diag.objective = best_obj;
        diag.centroid_distance = 1.0 - cosine_similarity(points.row(best), centroid);
        diag.min_anchor_distance = std::numeric_limits<double>::infinity();
        for (std::size_t j : anchors.present_classes()) {
            diag.min_anchor_distance =
                std::min(diag.min_anchor_distance, 1.0 - cosine_similarity(points.row(best), anchors.embedding(j)));
        }
        out.selected.push_back(candidate_ids[best]);
        out.diagnostics.push_back(diag);
    }
    return out;
}

}  // namespace decern
