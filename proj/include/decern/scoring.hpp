#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "decern/classifier.hpp"
#include "decern/numerics.hpp"
#include "decern/pools.hpp"

namespace decern {

// Where the weighted-probe term sits relative to the 1/N_c class average.
enum class WeightedTermPlacement {
    inside_average,   // S = mean_j [(1-R) a_j + R b_j + c_j]
    outside_average,  // S = mean_j [(1-R) a_j + R b_j] + sum_j c_j
};

struct FusionConfig {
    // Mask fraction R: share of embedding dimensions that take part in fusion.
    double mask_fraction = 0.1;
    // nullopt: lambda = skewness of the scores, clamped to [-1, 1].
    std::optional<double> fixed_lambda;
    WeightedTermPlacement weighted_term = WeightedTermPlacement::inside_average;

    void validate() const;
};

class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(std::size_t dim) : bits_(dim, 0) {}

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    void set(std::size_t i) { bits_[i] = 1; }
    std::size_t popcount() const;
    std::vector<std::size_t> active() const;

    static BinaryMask all(std::size_t dim);

private:
    std::vector<unsigned char> bits_;
};

// Number of active mask dimensions: ceil(R d), at least 1.
std::size_t mask_size(double mask_fraction, std::size_t dim);

// Mask on the mask_size dimensions with the largest |gradient|; ties go to the
// lower dimension index.
BinaryMask mask_from_gradient(std::span<const double> gradient, double mask_fraction);

// Gradient of the cross-entropy against the head's own argmax prediction,
// ranked by magnitude.
BinaryMask build_mask(const ClassifierHead& head, std::span<const double> z_u, const FusionConfig& cfg);

// Masked dimensions move from z_u toward z_anchor by alpha; others are copied.
Vector fuse(std::span<const double> z_u, std::span<const double> z_anchor, double alpha, const BinaryMask& mask);

struct ClassProbe {
    std::size_t cls = 0;
    double alpha = 0.0;  // p_u[cls]
    double beta = 0.0;   // (1 - cos(z_u, z_anchor)) / 2
    Vector p_fusion;     // (1 - alpha) p_u + alpha p_anchor
    Vector p_weighted;   // (1 - R alpha) p_u + R alpha p_anchor
    Vector p_mixed;      // classifier output on the fused embedding
};

struct ProbeSet {
    Vector p_u;
    std::vector<ClassProbe> classes;  // present classes only, ascending
};

ProbeSet probe(const ClassifierHead& head, std::span<const double> z_u, std::span<const double> p_u,
               const AnchorSet& anchors, const BinaryMask& mask, const FusionConfig& cfg);

// entropy(p_mixed)^(1 - beta) + cross_entropy(p_ref, p_mixed)^beta, with
// 0^0 = 1.
double score_dc(std::span<const double> p_ref, std::span<const double> p_mixed, double beta);

double instance_score(const ProbeSet& probes, const FusionConfig& cfg);

// Full pipeline for one unlabeled embedding.
double score_sample(const ClassifierHead& head, std::span<const double> z_u, const AnchorSet& anchors,
                    const FusionConfig& cfg);

struct ScoreTable {
    std::vector<std::size_t> indices;  // dataset index per row
    Vector scores;
    double mean = 0.0;
    double std = 0.0;  // population
    double skewness = 0.0;
    double lambda = 0.0;
    double zeta = 0.0;
};

// Scores every index in `unlabeled` against the anchors; threshold fields
// are left at zero until candidate_threshold runs.
ScoreTable score_pool(const ClassifierHead& head, const LabeledSamples& data,
                      std::span<const std::size_t> unlabeled, const AnchorSet& anchors, const FusionConfig& cfg);

struct ThresholdResult {
    double zeta = 0.0;
    double lambda = 0.0;
    // Row positions into the score table, ascending.
    std::vector<std::size_t> candidates;
    bool fallback = false;
};

// zeta = mean + lambda * std; candidates are rows with score > zeta. When
// fewer than `budget` rows survive, the `budget` highest scores are taken
// instead (ties to the lower row). Fills the summary fields of `table`.
ThresholdResult candidate_threshold(ScoreTable& table, std::size_t budget, const FusionConfig& cfg);

}  // namespace decern
