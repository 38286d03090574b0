#include "decern/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "decern/error.hpp"

namespace decern {

void FusionConfig::validate() const {
    if (!(mask_fraction > 0.0 && mask_fraction <= 1.0)) throw Error("mask fraction R must be in (0, 1]");
    if (fixed_lambda && !std::isfinite(*fixed_lambda)) throw Error("fixed lambda must be finite");
}

std::size_t BinaryMask::popcount() const {
    return static_cast<std::size_t>(std::ranges::count(bits_, static_cast<unsigned char>(1)));
}

std::vector<std::size_t> BinaryMask::active() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

BinaryMask BinaryMask::all(std::size_t dim) {
    BinaryMask m(dim);
    std::ranges::fill(m.bits_, static_cast<unsigned char>(1));
    return m;
}

std::size_t mask_size(double mask_fraction, std::size_t dim) {
    // The small offset keeps e.g. 0.1 * 30 = 3.0000000000000004 at 3.
    const double raw = std::ceil(mask_fraction * static_cast<double>(dim) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, dim);
}

BinaryMask mask_from_gradient(std::span<const double> gradient, double mask_fraction) {
    const std::size_t d = gradient.size();
    BinaryMask mask(d);
    if (d == 0) return mask;
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = mask_size(mask_fraction, d);
    std::ranges::partial_sort(order, order.begin() + static_cast<std::ptrdiff_t>(k),
                              [&](std::size_t a, std::size_t b) {
                                  const double ga = std::abs(gradient[a]);
                                  const double gb = std::abs(gradient[b]);
                                  return ga != gb ? ga > gb : a < b;
                              });
    for (std::size_t i = 0; i < k; ++i) mask.set(order[i]);
    return mask;
}

BinaryMask build_mask(const ClassifierHead& head, std::span<const double> z_u, const FusionConfig& cfg) {
    const std::size_t pseudo_label = head.predict(z_u);
    return mask_from_gradient(head.input_gradient(z_u, pseudo_label), cfg.mask_fraction);
}

Vector fuse(std::span<const double> z_u, std::span<const double> z_anchor, double alpha, const BinaryMask& mask) {
    if (z_u.size() != z_anchor.size() || z_u.size() != mask.size()) throw Error("dimension mismatch in fuse");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("fusion strength must be in [0, 1]");
    Vector out(z_u.begin(), z_u.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (mask[i]) out[i] = z_u[i] * (1.0 - alpha) + z_anchor[i] * alpha;
    }
    return out;
}

ProbeSet probe(const ClassifierHead& head, std::span<const double> z_u, std::span<const double> p_u,
               const AnchorSet& anchors, const BinaryMask& mask, const FusionConfig& cfg) {
    const std::size_t nc = anchors.num_classes();
    if (p_u.size() != nc) throw Error("probability length does not match anchor classes");
    if (anchors.present_count() == 0) throw Error("no anchor classes present");
    const double r = cfg.mask_fraction;

    ProbeSet out;
    out.p_u.assign(p_u.begin(), p_u.end());
    for (std::size_t j = 0; j < nc; ++j) {
        if (!anchors.present[j]) continue;
        const auto z_a = anchors.embedding(j);
        const auto p_a = anchors.probability(j);
        ClassProbe cp;
        cp.cls = j;
        cp.alpha = p_u[j];
        cp.beta = 1.0 - (1.0 + cosine_similarity(z_u, z_a)) / 2.0;
        cp.p_fusion.resize(nc);
        cp.p_weighted.resize(nc);
        for (std::size_t k = 0; k < nc; ++k) {
            cp.p_fusion[k] = (1.0 - cp.alpha) * p_u[k] + cp.alpha * p_a[k];
            cp.p_weighted[k] = (1.0 - r * cp.alpha) * p_u[k] + r * cp.alpha * p_a[k];
        }
        cp.p_mixed = head.predict_proba(fuse(z_u, z_a, cp.alpha, mask));
        out.classes.push_back(std::move(cp));
    }
    return out;
}

double score_dc(std::span<const double> p_ref, std::span<const double> p_mixed, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must be in [0, 1]");
    const double confusion = std::max(entropy(p_mixed), 0.0);
    const double discrepancy = std::max(cross_entropy(p_ref, p_mixed), 0.0);
    // std::pow(0, 0) == 1, which is the convention wanted here.
    return std::pow(confusion, 1.0 - beta) + std::pow(discrepancy, beta);
}

double instance_score(const ProbeSet& probes, const FusionConfig& cfg) {
    if (probes.classes.empty()) throw Error("no present classes to score");
    const double r = cfg.mask_fraction;
    double averaged = 0.0;
    double weighted = 0.0;
    for (const ClassProbe& cp : probes.classes) {
        averaged += (1.0 - r) * score_dc(probes.p_u, cp.p_mixed, cp.beta) + r * score_dc(cp.p_fusion, cp.p_mixed, cp.beta);
        const double w = score_dc(cp.p_weighted, cp.p_mixed, cp.beta);
        if (cfg.weighted_term == WeightedTermPlacement::inside_average) {
            averaged += w;
        } else {
            weighted += w;
        }
    }
    return averaged / static_cast<double>(probes.classes.size()) + weighted;
}

double score_sample(const ClassifierHead& head, std::span<const double> z_u, const AnchorSet& anchors,
                    const FusionConfig& cfg) {
    const Vector p_u = head.predict_proba(z_u);
    const BinaryMask mask = build_mask(head, z_u, cfg);
    return instance_score(probe(head, z_u, p_u, anchors, mask, cfg), cfg);
}

ScoreTable score_pool(const ClassifierHead& head, const LabeledSamples& data,
                      std::span<const std::size_t> unlabeled, const AnchorSet& anchors, const FusionConfig& cfg) {
    cfg.validate();
    ScoreTable table;
    table.indices.assign(unlabeled.begin(), unlabeled.end());
    table.scores.resize(unlabeled.size());
    for (std::size_t r = 0; r < unlabeled.size(); ++r) {
        table.scores[r] = score_sample(head, data.embeddings.row(unlabeled[r]), anchors, cfg);
    }
    return table;
}

ThresholdResult candidate_threshold(ScoreTable& table, std::size_t budget, const FusionConfig& cfg) {
    const Vector& s = table.scores;
    if (s.empty()) throw Error("empty score table");
    const MeanStd ms = mean_std(s);
    table.mean = ms.mean;
    table.std = ms.std;
    table.skewness = s.size() >= 2 ? skewness(s) : 0.0;
    table.lambda = cfg.fixed_lambda ? *cfg.fixed_lambda : std::clamp(table.skewness, -1.0, 1.0);
    table.zeta = ms.mean + table.lambda * ms.std;

    ThresholdResult out;
    out.zeta = table.zeta;
    out.lambda = table.lambda;
    for (std::size_t r = 0; r < s.size(); ++r) {
        if (s[r] > table.zeta) out.candidates.push_back(r);
    }
    if (out.candidates.size() < budget) {
        out.fallback = true;
        std::vector<std::size_t> order(s.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t k = std::min(budget, s.size());
        std::ranges::partial_sort(order, order.begin() + static_cast<std::ptrdiff_t>(k),
                                  [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
        order.resize(k);
        std::ranges::sort(order);
        out.candidates = std::move(order);
    }
    return out;
}

}  // namespace decern
