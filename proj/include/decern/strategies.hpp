#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "decern/classifier.hpp"
#include "decern/dataset.hpp"
#include "decern/diversity.hpp"
#include "decern/pools.hpp"
#include "decern/scoring.hpp"

namespace decern {

enum class StrategyKind { decern, random, kmeans, coreset, entropy, margin };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

struct StrategySpec {
    StrategyKind kind = StrategyKind::decern;
    FusionConfig fusion;  // decern only
    double xi = 0.8;      // decern only

    void validate() const;
};

// Threshold statistics of a DECERN selection.
struct ScoreSummary {
    double mean = 0.0;
    double std = 0.0;
    double skewness = 0.0;
    double lambda = 0.0;
    double zeta = 0.0;
    std::size_t candidates = 0;
    bool fallback = false;
};

struct SelectionOutcome {
    SelectionResult result;
    std::optional<ScoreSummary> scores;
    std::optional<ScoreTable> table;  // decern only: every unlabeled score
    // decern only, for audits: candidate dataset indices (clustering rows)
    // and the clustering they were split into.
    std::vector<std::size_t> candidate_ids;
    std::optional<WeightedClustering> clustering;
};

// Exactly `budget` distinct unlabeled indices, deterministic in `seed`.
// Throws InfeasibleError when fewer than `budget` samples are unlabeled.
SelectionOutcome select(const StrategySpec& spec, const ClassifierHead& head, const LabeledSamples& data,
                        const PoolState& pool, std::size_t budget, std::uint64_t seed);

SelectionResult random_select(const PoolState& pool, std::size_t budget, std::uint64_t seed);

// Highest entropy(p_u) first, ties to the lower index.
SelectionResult entropy_select(const ClassifierHead& head, const LabeledSamples& data, const PoolState& pool,
                               std::size_t budget);

// Smallest gap between the two largest probabilities first.
SelectionResult margin_select(const ClassifierHead& head, const LabeledSamples& data, const PoolState& pool,
                              std::size_t budget);

// Greedy k-center over Euclidean distance to labeled + already selected.
SelectionResult coreset_select(const LabeledSamples& data, const PoolState& pool, std::size_t budget);

// Unweighted k-means over the unlabeled pool; per cluster the member nearest
// (Euclidean) to the centroid.
SelectionResult kmeans_select(const LabeledSamples& data, const PoolState& pool, std::size_t budget,
                              std::uint64_t seed);

// DECERN: anchors, discrepancy-confusion scores, dynamic threshold,
// uncertainty-weighted clustering and calibration-diversity pick.
SelectionOutcome decern_select(const StrategySpec& spec, const ClassifierHead& head, const LabeledSamples& data,
                               const PoolState& pool, std::size_t budget, std::uint64_t seed);

}  // namespace decern
