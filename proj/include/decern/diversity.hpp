#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "decern/numerics.hpp"
#include "decern/pools.hpp"

namespace decern {

inline constexpr std::size_t kMaxLloydIterations = 300;

// Per-cluster picks treat values within this of the maximum as tied, so
// rounding noise cannot decide between mathematically equal members.
inline constexpr double kTieTolerance = 1e-12;

// Position of the first value within kTieTolerance of the maximum.
std::size_t first_near_max(std::span<const double> values);

struct WeightedClustering {
    std::vector<std::size_t> assignments;  // cluster id per point
    Matrix centroids;                      // k x d
    Vector weights;                        // normalized weights actually used
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t num_clusters() const noexcept { return centroids.rows(); }
    std::vector<std::vector<std::size_t>> members() const;
};

// Weights scaled so the largest is 1, then rounded to single precision.
// Any positive rescaling of the input maps to the same normalized weights,
// which makes the clustering invariant to it.
Vector normalize_weights(std::span<const double> weights);

// k-means++ seeding: first center drawn with probability proportional to the
// weight, later ones proportional to weight * squared distance to the nearest
// chosen center.
Matrix kmeanspp_init(const Matrix& points, std::span<const double> weights, std::size_t k, std::uint64_t seed);

// Lloyd iterations from given centroids with weighted centroid updates.
// Nearest centroid by squared Euclidean distance, ties to the lower cluster.
// An emptied cluster takes the point with the largest weighted squared
// distance to its own centroid (from a cluster with more than one member).
// Stops when assignments repeat or after `max_iterations`.
WeightedClustering weighted_lloyd(const Matrix& points, std::span<const double> weights, Matrix initial_centroids,
                                  std::size_t max_iterations = kMaxLloydIterations);

// Normalizes the weights, seeds with k-means++ and runs Lloyd.
// Throws InfeasibleError("insufficient candidates") if points.rows() < k.
WeightedClustering weighted_kmeans(const Matrix& points, std::span<const double> weights, std::size_t k,
                                   std::uint64_t seed);

struct SelectionDiagnostics {
    std::size_t cluster = 0;
    double objective = 0.0;
    double centroid_distance = 0.0;    // 1 - cos to the cluster centroid
    double min_anchor_distance = 0.0;  // min over present anchors of 1 - cos
};

struct SelectionResult {
    std::vector<std::size_t> selected;  // dataset indices
    std::vector<SelectionDiagnostics> diagnostics;
};

// -xi * (1 - cos(z, centroid)) + (1 - xi) * min_j (1 - cos(z, anchor_j))
double calibration_objective(std::span<const double> z, std::span<const double> centroid, const AnchorSet& anchors,
                             double xi);

// Per cluster, the member with the largest calibration objective (near ties,
// per first_near_max, go to the lower candidate position). `candidate_ids` maps point rows to dataset
// indices.
SelectionResult calibration_select(const WeightedClustering& clustering, const Matrix& points,
                                   std::span<const std::size_t> candidate_ids, const AnchorSet& anchors, double xi);

}  // namespace decern
