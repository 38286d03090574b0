#include "decern/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string>

#include "byte_io.hpp"
#include "decern/error.hpp"
#include "decern/random.hpp"

namespace decern {

namespace {

std::size_t parameter_count_for(const Architecture& a) {
    if (a.hidden_width == 0) return a.num_classes * a.input_dim + a.num_classes;
    return a.hidden_width * a.input_dim + a.hidden_width + a.num_classes * a.hidden_width + a.num_classes;
}

// y = W x + b for W stored row-major at `w` with shape out x in.
void affine(const double* w, const double* b, std::span<const double> x, std::size_t out, Vector& y) {
    y.assign(out, 0.0);
    const std::size_t in = x.size();
    for (std::size_t r = 0; r < out; ++r) {
        double s = b[r];
        const double* wr = w + r * in;
        for (std::size_t c = 0; c < in; ++c) s += wr[c] * x[c];
        y[r] = s;
    }
}

}  // namespace

ClassifierHead::ClassifierHead(Architecture arch) : arch_(arch) {
    if (arch_.input_dim == 0 || arch_.num_classes == 0) {
        throw Error("classifier needs a non-zero input dimension and class count");
    }
    params_.assign(parameter_count_for(arch_), 0.0);
}

ClassifierHead ClassifierHead::initialized(Architecture arch, std::uint64_t seed) {
    ClassifierHead head(arch);
    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t fan_out, std::size_t fan_in) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < fan_out * fan_in; ++i) head.params_[offset + i] = rng.uniform(-limit, limit);
    };
    const std::size_t d = arch.input_dim;
    const std::size_t c = arch.num_classes;
    if (arch.hidden_width == 0) {
        fill(0, c, d);
    } else {
        const std::size_t h = arch.hidden_width;
        fill(0, h, d);
        fill(h * d + h, c, h);
    }
    return head;
}

void ClassifierHead::check_input(std::span<const double> z) const {
    if (z.size() != arch_.input_dim) {
        throw Error("dimension mismatch: expected " + std::to_string(arch_.input_dim) + ", got " +
                    std::to_string(z.size()));
    }
}

ClassifierHead::Forward ClassifierHead::forward(std::span<const double> z) const {
    check_input(z);
    Forward f;
    const std::size_t d = arch_.input_dim;
    const std::size_t c = arch_.num_classes;
    const double* p = params_.data();
    if (arch_.hidden_width == 0) {
        affine(p, p + c * d, z, c, f.logits);
        return f;
    }
    const std::size_t h = arch_.hidden_width;
    affine(p, p + h * d, z, h, f.hidden_pre);
    f.hidden.resize(h);
    for (std::size_t i = 0; i < h; ++i) f.hidden[i] = std::max(f.hidden_pre[i], 0.0);
    const double* p2 = p + h * d + h;
    affine(p2, p2 + c * h, f.hidden, c, f.logits);
    return f;
}

Vector ClassifierHead::logits(std::span<const double> z) const { return forward(z).logits; }

Vector ClassifierHead::predict_proba(std::span<const double> z) const { return softmax(forward(z).logits); }

std::size_t ClassifierHead::predict(std::span<const double> z) const { return argmax(forward(z).logits); }

double ClassifierHead::accumulate_gradient(std::span<const double> z, std::size_t target,
                                           std::span<double> grad) const {
    if (target >= arch_.num_classes) throw Error("target class out of range");
    if (grad.size() != params_.size()) throw Error("gradient buffer has the wrong size");
    const Forward f = forward(z);
    Vector delta = softmax(f.logits);
    const double mx = *std::ranges::max_element(f.logits);
    double sum_exp = 0.0;
    for (double l : f.logits) sum_exp += std::exp(l - mx);
    const double loss = mx + std::log(sum_exp) - f.logits[target];
    delta[target] -= 1.0;

    const std::size_t d = arch_.input_dim;
    const std::size_t c = arch_.num_classes;
    if (arch_.hidden_width == 0) {
        for (std::size_t r = 0; r < c; ++r) {
            double* gw = grad.data() + r * d;
            for (std::size_t k = 0; k < d; ++k) gw[k] += delta[r] * z[k];
            grad[c * d + r] += delta[r];
        }
        return loss;
    }

    const std::size_t h = arch_.hidden_width;
    const std::size_t off2 = h * d + h;
    const double* w2 = params_.data() + off2;
    Vector dhidden(h, 0.0);
    for (std::size_t r = 0; r < c; ++r) {
        double* gw = grad.data() + off2 + r * h;
        for (std::size_t k = 0; k < h; ++k) {
            gw[k] += delta[r] * f.hidden[k];
            dhidden[k] += w2[r * h + k] * delta[r];
        }
        grad[off2 + c * h + r] += delta[r];
    }
    for (std::size_t k = 0; k < h; ++k) {
        if (f.hidden_pre[k] <= 0.0) continue;
        double* gw = grad.data() + k * d;
        for (std::size_t i = 0; i < d; ++i) gw[i] += dhidden[k] * z[i];
        grad[h * d + k] += dhidden[k];
    }
    return loss;
}

Vector ClassifierHead::input_gradient(std::span<const double> z, std::size_t target) const {
    if (target >= arch_.num_classes) throw Error("target class out of range");
    const Forward f = forward(z);
    Vector delta = softmax(f.logits);
    delta[target] -= 1.0;

    const std::size_t d = arch_.input_dim;
    const std::size_t c = arch_.num_classes;
    Vector g(d, 0.0);
    if (arch_.hidden_width == 0) {
        // W^T (p - onehot)
        for (std::size_t r = 0; r < c; ++r) {
            const double* wr = params_.data() + r * d;
            for (std::size_t k = 0; k < d; ++k) g[k] += wr[k] * delta[r];
        }
        return g;
    }
    const std::size_t h = arch_.hidden_width;
    const double* w2 = params_.data() + h * d + h;
    Vector dhidden(h, 0.0);
    for (std::size_t r = 0; r < c; ++r) {
        for (std::size_t k = 0; k < h; ++k) dhidden[k] += w2[r * h + k] * delta[r];
    }
    for (std::size_t k = 0; k < h; ++k) {
        if (f.hidden_pre[k] <= 0.0) continue;
        const double* w1 = params_.data() + k * d;
        for (std::size_t i = 0; i < d; ++i) g[i] += w1[i] * dhidden[k];
    }
    return g;
}

void AdamState::apply(std::span<double> params, std::span<const double> grad, double lr) {
    if (params.size() != m.size() || grad.size() != m.size()) throw Error("optimizer state shape mismatch");
    ++step;
    const double t = static_cast<double>(step);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = m[i] / c1;
        const double vhat = v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw Error("batch size must be >= 1");
    if (epochs < 1) throw Error("epochs must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw Error("learning rate must be >= 0");
}

double cosine_lr(double base, std::size_t step, std::size_t total_steps) {
    if (total_steps == 0) return base;
    const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
    return base * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

namespace {

double mean_loss(const ClassifierHead& head, const LabeledSamples& data, std::span<const std::size_t> idx) {
    double total = 0.0;
    for (std::size_t i : idx) {
        const Vector p = head.predict_proba(data.embeddings.row(i));
        total += -std::log(std::max(p[data.labels[i]], kLogClamp));
    }
    return total / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train(ClassifierHead head, const LabeledSamples& data, std::span<const std::size_t> labeled,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (labeled.empty()) throw Error("empty labeled set");
    const std::size_t nc = head.architecture().num_classes;
    for (std::size_t i : labeled) {
        if (i >= data.size()) throw Error("labeled index " + std::to_string(i) + " out of range");
        if (data.labels[i] >= nc) throw Error("label out of range for classifier");
    }

    std::vector<std::size_t> order(labeled.begin(), labeled.end());
    std::ranges::sort(order);
    const std::size_t steps_per_epoch = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t total_steps = steps_per_epoch * cfg.epochs;

    TrainResult result{std::move(head), {}};
    result.loss_trace.reserve(cfg.epochs + 1);
    result.loss_trace.push_back(mean_loss(result.head, data, order));

    AdamState adam(result.head.parameter_count());
    std::vector<double> grad(result.head.parameter_count());
    Rng rng(cfg.seed);
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::ranges::fill(grad, 0.0);
            for (std::size_t k = start; k < stop; ++k) {
                const std::size_t i = order[k];
                result.head.accumulate_gradient(data.embeddings.row(i), data.labels[i], grad);
            }
            const double inv = 1.0 / static_cast<double>(stop - start);
            for (double& g : grad) g *= inv;
            const double lr = cfg.cosine_decay ? cosine_lr(cfg.learning_rate, step, total_steps) : cfg.learning_rate;
            if (lr > 0.0) adam.apply(result.head.parameters(), grad, lr);
            ++step;
        }
        result.loss_trace.push_back(mean_loss(result.head, data, order));
    }
    for (double p : result.head.parameters()) {
        if (!std::isfinite(p)) throw Error("training diverged: non-finite parameter");
    }
    return result;
}

double evaluate_accuracy(const ClassifierHead& head, const LabeledSamples& data, std::span<const std::size_t> indices) {
    if (indices.empty()) throw Error("empty evaluation set");
    std::size_t correct = 0;
    for (std::size_t i : indices) {
        if (i >= data.size()) throw Error("evaluation index out of range");
        if (head.predict(data.embeddings.row(i)) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

double evaluate_accuracy(const ClassifierHead& head, const LabeledSamples& data) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return evaluate_accuracy(head, data, all);
}

void save_head(const std::filesystem::path& path, const ClassifierHead& head) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    const Architecture& a = head.architecture();
    out.write(kHeadMagic, 8);
    detail::put_le<std::uint32_t>(out, kHeadVersion);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.input_dim));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.hidden_width));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(a.num_classes));
    for (double p : head.parameters()) detail::put_f64(out, p);
    out.flush();
    if (!out) throw Error("write failed for " + path.string());
}

ClassifierHead load_head(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    detail::expect_magic(in, kHeadMagic);
    const auto version = detail::get_le<std::uint32_t>(in, "version");
    if (version != kHeadVersion) throw SchemaError("unsupported DCRNHEAD version " + std::to_string(version));
    Architecture a;
    a.input_dim = detail::get_le<std::uint32_t>(in, "d");
    a.hidden_width = detail::get_le<std::uint32_t>(in, "h");
    a.num_classes = detail::get_le<std::uint32_t>(in, "N_c");
    ClassifierHead head(a);
    for (double& p : head.parameters()) p = detail::get_f64(in, "parameters");
    if (in.peek() != std::char_traits<char>::eof()) throw SchemaError("trailing bytes in DCRNHEAD file");
    return head;
}

}  // namespace decern
