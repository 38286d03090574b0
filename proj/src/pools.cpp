#include "decern/pools.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "decern/error.hpp"
#include "decern/random.hpp"

namespace decern {

PoolState PoolState::all_unlabeled(std::size_t n) {
    PoolState s;
    s.unlabeled.resize(n);
    std::iota(s.unlabeled.begin(), s.unlabeled.end(), std::size_t{0});
    return s;
}

void PoolState::check(std::size_t n) const {
    if (size() != n) throw Error("pool sizes do not cover the dataset");
    std::vector<bool> seen(n, false);
    for (const auto* part : {&labeled, &unlabeled}) {
        for (std::size_t i : *part) {
            if (i >= n || seen[i]) throw Error("pool invariant violated at index " + std::to_string(i));
            seen[i] = true;
        }
        if (!std::ranges::is_sorted(*part)) throw Error("pool list not sorted");
    }
}

std::vector<std::size_t> initial_seed_selection(std::size_t n, std::size_t budget, std::uint64_t seed) {
    if (budget > n) {
        throw InfeasibleError("seed budget " + std::to_string(budget) + " exceeds pool size " + std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    // Partial Fisher-Yates: the first `budget` slots are the sample.
    for (std::size_t i = 0; i < budget; ++i) {
        const std::size_t j = i + rng.index(n - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(budget);
    std::ranges::sort(idx);
    return idx;
}

PoolState update_pools(const PoolState& state, std::span<const std::size_t> selected) {
    const std::size_t n = state.size();
    std::vector<char> is_labeled(n, 0);
    for (std::size_t i : state.labeled) is_labeled[i] = 1;
    std::vector<char> picked(n, 0);
    for (std::size_t i : selected) {
        if (i >= n) throw Error("selected index " + std::to_string(i) + " out of range");
        if (is_labeled[i] || picked[i]) throw Error("duplicate selection");
        picked[i] = 1;
    }
    PoolState next;
    next.cycle = state.cycle + 1;
    next.labeled = state.labeled;
    next.labeled.insert(next.labeled.end(), selected.begin(), selected.end());
    std::ranges::sort(next.labeled);
    next.unlabeled.reserve(state.unlabeled.size() - selected.size());
    for (std::size_t i : state.unlabeled) {
        if (!picked[i]) next.unlabeled.push_back(i);
    }
    return next;
}

std::uint64_t pool_hash(std::span<const std::size_t> labeled) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i : labeled) {
        auto v = static_cast<std::uint64_t>(i);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::vector<Label> Oracle::label(std::span<const std::size_t> indices) {
    std::vector<Label> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= data_->size()) throw Error("oracle index " + std::to_string(i) + " out of range");
        out.push_back(data_->labels[i]);
    }
    revealed_ += indices.size();
    return out;
}

std::size_t AnchorSet::present_count() const {
    return static_cast<std::size_t>(std::ranges::count(present, true));
}

std::vector<std::size_t> AnchorSet::present_classes() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < present.size(); ++j) {
        if (present[j]) out.push_back(j);
    }
    return out;
}

std::span<const double> AnchorSet::embedding(std::size_t j) const {
    if (j >= present.size() || !present[j]) throw Error("anchor for class " + std::to_string(j) + " is absent");
    return z_anchor.row(j);
}

std::span<const double> AnchorSet::probability(std::size_t j) const {
    if (j >= present.size() || !present[j]) throw Error("anchor for class " + std::to_string(j) + " is absent");
    return p_anchor.row(j);
}

AnchorSet build_anchors(const ClassifierHead& head, const LabeledSamples& data,
                        std::span<const std::size_t> labeled) {
    if (labeled.empty()) throw Error("empty labeled set");
    const std::size_t nc = head.architecture().num_classes;
    const std::size_t d = data.dim();
    AnchorSet a{Matrix(nc, d), Matrix(nc, nc), std::vector<bool>(nc, false)};
    std::vector<std::size_t> counts(nc, 0);

    std::vector<std::size_t> order(labeled.begin(), labeled.end());
    std::ranges::sort(order);
    for (std::size_t i : order) {
        if (i >= data.size()) throw Error("labeled index out of range");
        const Label y = data.labels[i];
        if (y >= nc) throw Error("label out of range for anchors");
        const auto z = data.embeddings.row(i);
        const Vector p = head.predict_proba(z);
        auto zr = a.z_anchor.row(y);
        auto pr = a.p_anchor.row(y);
        for (std::size_t k = 0; k < d; ++k) zr[k] += z[k];
        for (std::size_t k = 0; k < nc; ++k) pr[k] += p[k];
        ++counts[y];
    }
    for (std::size_t j = 0; j < nc; ++j) {
        if (counts[j] == 0) continue;
        a.present[j] = true;
        const double count = static_cast<double>(counts[j]);
        for (double& v : a.z_anchor.row(j)) v /= count;
        for (double& v : a.p_anchor.row(j)) v /= count;
    }
    return a;
}

}  // namespace decern
