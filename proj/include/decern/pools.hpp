#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "decern/classifier.hpp"
#include "decern/dataset.hpp"
#include "decern/numerics.hpp"

namespace decern {

// Labeled / unlabeled split of the train indices. Both lists are kept sorted
// ascending and together cover 0..N-1 exactly once.
struct PoolState {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::size_t cycle = 0;

    std::size_t size() const noexcept { return labeled.size() + unlabeled.size(); }

    // Everything unlabeled, cycle 0.
    static PoolState all_unlabeled(std::size_t n);

    // Throws if the disjoint-cover invariant is broken.
    void check(std::size_t n) const;

    bool operator==(const PoolState&) const = default;
};

// B distinct indices drawn uniformly without replacement from [0, n),
// returned ascending. Throws when B > n.
std::vector<std::size_t> initial_seed_selection(std::size_t n, std::size_t budget, std::uint64_t seed);

// Moves `selected` from unlabeled to labeled and advances the cycle counter.
// Throws "duplicate selection" when an index is already labeled or repeated.
PoolState update_pools(const PoolState& state, std::span<const std::size_t> selected);

// FNV-1a over the labeled index list; used to audit that strategies start
// from the same pool.
std::uint64_t pool_hash(std::span<const std::size_t> labeled);

/**
 * Simulated annotator. Reveals ground-truth labels of the train split and
 * counts every label handed out.
 */
class Oracle {
public:
    explicit Oracle(const LabeledSamples& data) : data_(&data) {}

    std::vector<Label> label(std::span<const std::size_t> indices);

    std::size_t revealed() const noexcept { return revealed_; }

private:
    const LabeledSamples* data_;
    std::size_t revealed_ = 0;
};

/**
 * Per-class anchors: mean embedding and mean predicted probability of the
 * labeled samples of each class.
 *
 * A class without labeled samples is marked absent; its rows are zero and
 * must not be used (the accessors throw).
 */
struct AnchorSet {
    Matrix z_anchor;  // N_c x d
    Matrix p_anchor;  // N_c x N_c
    std::vector<bool> present;

    std::size_t num_classes() const noexcept { return present.size(); }
    std::size_t present_count() const;
    std::vector<std::size_t> present_classes() const;

    std::span<const double> embedding(std::size_t j) const;
    std::span<const double> probability(std::size_t j) const;
};

AnchorSet build_anchors(const ClassifierHead& head, const LabeledSamples& data,
                        std::span<const std::size_t> labeled);

}  // namespace decern
