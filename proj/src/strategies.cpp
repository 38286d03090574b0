#include "decern/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "decern/error.hpp"
#include "decern/random.hpp"

namespace decern {

std::string_view to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::decern: return "decern";
        case StrategyKind::random: return "random";
        case StrategyKind::kmeans: return "kmeans";
        case StrategyKind::coreset: return "coreset";
        case StrategyKind::entropy: return "entropy";
        case StrategyKind::margin: return "margin";
    }
    return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
    for (StrategyKind k : {StrategyKind::decern, StrategyKind::random, StrategyKind::kmeans, StrategyKind::coreset,
                           StrategyKind::entropy, StrategyKind::margin}) {
        if (to_string(k) == name) return k;
    }
    throw Error("unknown strategy '" + std::string(name) + "'");
}

void StrategySpec::validate() const {
    if (kind == StrategyKind::decern) {
        fusion.validate();
        if (!(xi >= 0.0 && xi <= 1.0)) throw Error("xi must be in [0, 1]");
    }
}

namespace {

void require_budget(const PoolState& pool, std::size_t budget) {
    if (pool.unlabeled.size() < budget) {
        throw InfeasibleError("budget " + std::to_string(budget) + " exceeds unlabeled pool of " +
                              std::to_string(pool.unlabeled.size()));
    }
}

// Top `budget` unlabeled indices by key (larger first), ties to the lower index.
SelectionResult top_by(const PoolState& pool, std::size_t budget, const std::vector<double>& key) {
    std::vector<std::size_t> order(pool.unlabeled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::partial_sort(order, order.begin() + static_cast<std::ptrdiff_t>(budget),
                              [&](std::size_t a, std::size_t b) {
                                  return key[a] != key[b] ? key[a] > key[b] : pool.unlabeled[a] < pool.unlabeled[b];
                              });
    SelectionResult out;
    for (std::size_t r = 0; r < budget; ++r) out.selected.push_back(pool.unlabeled[order[r]]);
    return out;
}

}  // namespace

SelectionResult random_select(const PoolState& pool, std::size_t budget, std::uint64_t seed) {
    require_budget(pool, budget);
    SelectionResult out;
    for (std::size_t r : initial_seed_selection(pool.unlabeled.size(), budget, seed)) {
        out.selected.push_back(pool.unlabeled[r]);
    }
    return out;
}

SelectionResult entropy_select(const ClassifierHead& head, const LabeledSamples& data, const PoolState& pool,
                               std::size_t budget) {
    require_budget(pool, budget);
    std::vector<double> key;
    key.reserve(pool.unlabeled.size());
    for (std::size_t i : pool.unlabeled) key.push_back(entropy(head.predict_proba(data.embeddings.row(i))));
    return top_by(pool, budget, key);
}

SelectionResult margin_select(const ClassifierHead& head, const LabeledSamples& data, const PoolState& pool,
                              std::size_t budget) {
    require_budget(pool, budget);
    std::vector<double> key;
    key.reserve(pool.unlabeled.size());
    for (std::size_t i : pool.unlabeled) {
        Vector p = head.predict_proba(data.embeddings.row(i));
        double margin = 1.0;
        if (p.size() >= 2) {
            std::ranges::partial_sort(p, p.begin() + 2, std::greater<>{});
            margin = p[0] - p[1];
        }
        key.push_back(-margin);
    }
    return top_by(pool, budget, key);
}

SelectionResult coreset_select(const LabeledSamples& data, const PoolState& pool, std::size_t budget) {
    require_budget(pool, budget);
    if (pool.labeled.empty()) throw Error("coreset needs a non-empty labeled pool");
    const std::size_t n = pool.unlabeled.size();
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < n; ++r) {
        const auto z = data.embeddings.row(pool.unlabeled[r]);
        for (std::size_t l : pool.labeled) min_d[r] = std::min(min_d[r], squared_distance(z, data.embeddings.row(l)));
    }
    std::vector<bool> taken(n, false);
    SelectionResult out;
    for (std::size_t step = 0; step < budget; ++step) {
        std::size_t best = n;
        for (std::size_t r = 0; r < n; ++r) {
            if (taken[r]) continue;
            if (best == n || min_d[r] > min_d[best]) best = r;
        }
        taken[best] = true;
        out.selected.push_back(pool.unlabeled[best]);
        const auto zb = data.embeddings.row(pool.unlabeled[best]);
        for (std::size_t r = 0; r < n; ++r) {
            if (!taken[r]) min_d[r] = std::min(min_d[r], squared_distance(data.embeddings.row(pool.unlabeled[r]), zb));
        }
    }
    return out;
}

SelectionResult kmeans_select(const LabeledSamples& data, const PoolState& pool, std::size_t budget,
                              std::uint64_t seed) {
    require_budget(pool, budget);
    SelectionResult out;
    if (budget == 0) return out;
    const Matrix points = data.embeddings.select_rows(pool.unlabeled);
    const std::vector<double> ones(points.rows(), 1.0);
    const WeightedClustering km = weighted_kmeans(points, ones, budget, seed);
    const auto groups = km.members();
    for (std::size_t c = 0; c < groups.size(); ++c) {
        std::vector<double> closeness;
        for (std::size_t i : groups[c]) closeness.push_back(-squared_distance(points.row(i), km.centroids.row(c)));
        out.selected.push_back(pool.unlabeled[groups[c][first_near_max(closeness)]]);
    }
    return out;
}

SelectionOutcome decern_select(const StrategySpec& spec, const ClassifierHead& head, const LabeledSamples& data,
                               const PoolState& pool, std::size_t budget, std::uint64_t seed) {
    spec.validate();
    require_budget(pool, budget);
    if (pool.labeled.empty()) throw Error("decern needs a non-empty labeled pool for anchors");
    SelectionOutcome out;
    if (budget == 0) return out;

    const AnchorSet anchors = build_anchors(head, data, pool.labeled);
    ScoreTable table = score_pool(head, data, pool.unlabeled, anchors, spec.fusion);
    const ThresholdResult thr = candidate_threshold(table, budget, spec.fusion);

    std::vector<std::size_t> ids;
    std::vector<double> weights;
    for (std::size_t r : thr.candidates) {
        ids.push_back(table.indices[r]);
        weights.push_back(table.scores[r]);
    }
    if (std::ranges::all_of(weights, [](double w) { return w == 0.0; })) std::ranges::fill(weights, 1.0);

    const Matrix points = data.embeddings.select_rows(ids);
    WeightedClustering clusters = weighted_kmeans(points, weights, budget, seed);
    out.result = calibration_select(clusters, points, ids, anchors, spec.xi);
    out.scores = ScoreSummary{table.mean, table.std, table.skewness, table.lambda,
                              table.zeta, thr.candidates.size(), thr.fallback};
    out.table = std::move(table);
    out.candidate_ids = std::move(ids);
    out.clustering = std::move(clusters);
    return out;
}

SelectionOutcome select(const StrategySpec& spec, const ClassifierHead& head, const LabeledSamples& data,
                        const PoolState& pool, std::size_t budget, std::uint64_t seed) {
    spec.validate();
    switch (spec.kind) {
        case StrategyKind::decern: return decern_select(spec, head, data, pool, budget, seed);
        case StrategyKind::random: return {random_select(pool, budget, seed), std::nullopt, std::nullopt, {}, std::nullopt};
        case StrategyKind::kmeans: return {kmeans_select(data, pool, budget, seed), std::nullopt, std::nullopt, {}, std::nullopt};
        case StrategyKind::coreset: return {coreset_select(data, pool, budget), std::nullopt, std::nullopt, {}, std::nullopt};
        case StrategyKind::entropy: return {entropy_select(head, data, pool, budget), std::nullopt, std::nullopt, {}, std::nullopt};
        case StrategyKind::margin: return {margin_select(head, data, pool, budget), std::nullopt, std::nullopt, {}, std::nullopt};
    }
    throw Error("unhandled strategy kind");
}

}  // namespace decern
