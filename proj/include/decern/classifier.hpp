#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "decern/dataset.hpp"
#include "decern/numerics.hpp"

namespace decern {

struct Architecture {
    std::size_t input_dim = 0;
    std::size_t hidden_width = 0;  // 0 = linear head, otherwise one ReLU hidden layer
    std::size_t num_classes = 0;

    bool operator==(const Architecture&) const = default;
};

/**
 * Softmax classifier over frozen embeddings.
 *
 * Parameters live in one flat vector so the optimizer can treat them
 * uniformly. Layout, row-major:
 *   linear:  W[N_c x d], b[N_c]
 *   hidden:  W1[h x d], b1[h], W2[N_c x h], b2[N_c]
 */
class ClassifierHead {
public:
    // All-zero parameters.
    explicit ClassifierHead(Architecture arch);

    // Glorot-uniform weights, zero biases.
    static ClassifierHead initialized(Architecture arch, std::uint64_t seed);

    const Architecture& architecture() const noexcept { return arch_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    Vector logits(std::span<const double> z) const;
    Vector predict_proba(std::span<const double> z) const;
    // argmax of the logits; ties to the lowest class index.
    std::size_t predict(std::span<const double> z) const;

    // Cross-entropy loss of one sample; its parameter gradient is added into
    // `grad` (same layout as parameters()).
    double accumulate_gradient(std::span<const double> z, std::size_t target, std::span<double> grad) const;

    // d loss / d z for the cross-entropy loss against `target`.
    Vector input_gradient(std::span<const double> z, std::size_t target) const;

    bool operator==(const ClassifierHead&) const = default;

private:
    struct Forward {
        Vector hidden_pre;  // empty for linear heads
        Vector hidden;
        Vector logits;
    };
    Forward forward(std::span<const double> z) const;
    void check_input(std::span<const double> z) const;

    Architecture arch_;
    std::vector<double> params_;
};

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    // One bias-corrected Adam update at learning rate `lr`.
    void apply(std::span<double> params, std::span<const double> grad, double lr);
};

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t batch_size = 128;
    std::size_t epochs = 100;
    bool cosine_decay = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainResult {
    ClassifierHead head;
    // Mean cross-entropy over the labeled set: entry 0 before training,
    // entry e after epoch e.
    std::vector<double> loss_trace;
};

TrainResult train(ClassifierHead head, const LabeledSamples& data, std::span<const std::size_t> labeled,
                  const TrainConfig& cfg);

// Learning rate at step t of T under the cosine schedule.
double cosine_lr(double base, std::size_t step, std::size_t total_steps);

// Fraction of `indices` whose argmax prediction equals the label.
double evaluate_accuracy(const ClassifierHead& head, const LabeledSamples& data, std::span<const std::size_t> indices);

// Accuracy over every sample in `data`.
double evaluate_accuracy(const ClassifierHead& head, const LabeledSamples& data);

// DCRNHEAD v1, little-endian:
//   "DCRNHEAD" | u32 version | u32 d | u32 h | u32 N_c | f64[P] parameters
inline constexpr char kHeadMagic[8] = {'D', 'C', 'R', 'N', 'H', 'E', 'A', 'D'};
inline constexpr std::uint32_t kHeadVersion = 1;

void save_head(const std::filesystem::path& path, const ClassifierHead& head);
ClassifierHead load_head(const std::filesystem::path& path);

}  // namespace decern
