#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decern/classifier.hpp"
#include "decern/dataset.hpp"
#include "decern/strategies.hpp"

namespace decern {

struct SyntheticSpec {
    std::size_t num_classes = 20;
    std::size_t per_class = 100;
    std::size_t dim = 64;
    double spread = 4.0;   // radius of the sphere the class centers sit on
    double noise = 1.0;    // per-dimension std of the Gaussian around a center
    double overlap = 0.0;  // in [0, 1); shrinks the center radius by (1 - overlap)
    std::uint64_t seed = 0;
    double test_fraction = 0.3;

    void validate() const;
};

// Samples in generation order (class by class), before the train/test split.
LabeledSamples generate_samples(const SyntheticSpec& spec);

// generate_samples followed by stratified_split(..., spec.test_fraction, spec.seed).
FeatureDataset generate_synthetic(const SyntheticSpec& spec);

struct DatasetSource {
    enum class Kind { synthetic, file };
    Kind kind = Kind::synthetic;
    SyntheticSpec synthetic;  // its test_fraction and seed-based split are not used here
    std::filesystem::path path;
    std::uint64_t split_seed = 0;
    double test_fraction = 0.3;
};

// Both kinds split with (test_fraction, split_seed), so a file written by
// generate_samples loads to the same dataset as its synthetic source.
FeatureDataset load_dataset(const DatasetSource& source);

struct RunConfig {
    DatasetSource dataset;
    StrategySpec strategy;
    std::vector<StrategyKind> sweep;  // strategies for a sweep; empty for a single run
    std::size_t budget_multiplier = 1;  // K, budget B = K * N_c
    std::size_t cycles = 8;             // including the random seed cycle
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    TrainConfig train;
    std::size_t hidden_width = 0;
    std::filesystem::path output_dir = "out";
    bool record_timing = false;
    bool dump_scores = false;  // keep full DECERN score tables in the reports
    // Strategies see a random subset of this many unlabeled samples per
    // cycle; 0 (default) means the whole pool.
    std::size_t pool_subsample = 0;
    std::size_t jobs = 1;

    void validate() const;
};

struct PhaseTiming {
    double select_ms = 0.0;
    double train_ms = 0.0;
    double eval_ms = 0.0;

    double total() const { return select_ms + train_ms + eval_ms; }
};

struct CycleReport {
    std::size_t cycle = 0;
    double accuracy = 0.0;
    double imbalance = 0.0;
    std::size_t labeled = 0;
    std::size_t oracle_reveals = 0;
    std::uint64_t pool_hash = 0;
    std::vector<std::size_t> selected;
    std::optional<ScoreSummary> scores;
    std::optional<ScoreTable> score_table;  // only with RunConfig::dump_scores
    PhaseTiming timing;
};

struct SeedRun {
    StrategyKind strategy = StrategyKind::random;
    std::uint64_t seed = 0;
    std::vector<CycleReport> cycles;
};

struct ExperimentResult {
    std::vector<SeedRun> runs;  // strategy-major, then seed, in config order
};

// 1 - (base-2 entropy of the class histogram) / log2(N_c).
double imbalance(std::span<const Label> labels, std::size_t num_classes);

// Runs every (strategy, seed) job. Cycle 0 labels a random seed set of size
// B shared by all strategies with the same seed; each later cycle selects B
// more with the strategy, then retrains the head from scratch and evaluates
// on the test split.
ExperimentResult run_experiment(const RunConfig& cfg, const FeatureDataset& dataset);

SeedRun run_single(const RunConfig& cfg, const FeatureDataset& dataset, const StrategySpec& strategy,
                   std::uint64_t seed);

struct AggregateRow {
    std::size_t cycle = 0;
    double accuracy_mean = 0.0;
    double accuracy_std = 0.0;  // sample std (n - 1), 0 for one seed
    double imbalance_mean = 0.0;
    double imbalance_std = 0.0;
};

// Per-cycle mean/std across seeds. Throws on ragged cycle counts.
std::vector<AggregateRow> aggregate(std::span<const std::vector<CycleReport>> per_seed);

// Runs of `result` for one strategy, in order.
std::vector<std::vector<CycleReport>> runs_for(const ExperimentResult& result, StrategyKind kind);

std::vector<StrategyKind> strategies_in(const ExperimentResult& result);

}  // namespace decern
