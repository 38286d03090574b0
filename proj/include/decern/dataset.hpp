#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "decern/numerics.hpp"

namespace decern {

using Label = std::uint32_t;

// One block of samples: embeddings (N x d) and their class ids.
struct LabeledSamples {
    Matrix embeddings;
    std::vector<Label> labels;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dim() const noexcept { return embeddings.cols(); }

    bool operator==(const LabeledSamples&) const = default;
};

/**
 * Precomputed feature embeddings with ground-truth labels.
 *
 * `train` is the active-learning pool; its labels stay hidden behind the
 * Oracle during an experiment. `test` is the held-out evaluation split and
 * may be empty.
 */
struct FeatureDataset {
    LabeledSamples train;
    LabeledSamples test;
    std::size_t num_classes = 0;

    std::size_t dim() const noexcept { return train.dim(); }

    // Checks shapes, label range and that every class occurs somewhere.
    void validate() const;

    bool operator==(const FeatureDataset&) const = default;
};

// Per class, the first floor(test_fraction * n_c) samples of a seeded
// shuffle go to test; the rest (at least one) stay in train. Both halves keep
// ascending original order.
FeatureDataset stratified_split(const LabeledSamples& all, std::size_t num_classes, double test_fraction,
                                std::uint64_t seed);

// Concatenation train ++ test, the inverse of storage order used by the file
// writers below.
LabeledSamples merge_splits(const FeatureDataset& dataset);

// DCRNDATA v1, little-endian:
//   "DCRNDATA" | u32 version | u64 N | u32 d | u32 N_c | f64[N*d] row-major | u32[N] labels
inline constexpr char kDataMagic[8] = {'D', 'C', 'R', 'N', 'D', 'A', 'T', 'A'};
inline constexpr std::uint32_t kDataVersion = 1;
inline constexpr std::size_t kDataHeaderBytes = 8 + 4 + 8 + 4 + 4;

void write_samples_binary(const std::filesystem::path& path, const LabeledSamples& samples,
                          std::size_t num_classes);

struct LoadedSamples {
    LabeledSamples samples;
    std::size_t num_classes = 0;
};

LoadedSamples read_samples_binary(const std::filesystem::path& path);

// CSV form: header row, one embedding value per column, label column last.
void write_samples_csv(const std::filesystem::path& path, const LabeledSamples& samples);

// N_c is taken as max(label) + 1 unless `num_classes` is non-zero.
LoadedSamples read_samples_csv(const std::filesystem::path& path, std::size_t num_classes = 0);

// Dispatches on extension: ".csv" is CSV, anything else DCRNDATA.
LoadedSamples read_samples(const std::filesystem::path& path);

}  // namespace decern
