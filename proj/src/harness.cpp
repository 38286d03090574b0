#include "decern/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>

#include "decern/error.hpp"
#include "decern/pools.hpp"
#include "decern/random.hpp"

namespace decern {

namespace {

// Stream tags for derive_seed.
enum : std::uint64_t {
    kSeedSet = 1,
    kHeadInit = 2,
    kShuffle = 3,
    kSelect = 4,
    kSubsample = 5,
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void SyntheticSpec::validate() const {
    if (num_classes < 1 || per_class < 1 || dim < 1) throw Error("synthetic counts must be >= 1");
    if (!(noise > 0.0)) throw Error("synthetic noise scale must be > 0");
    if (!(spread >= 0.0)) throw Error("synthetic spread must be >= 0");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw Error("synthetic overlap must be in [0, 1)");
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw Error("test fraction must be in [0, 1)");
}

LabeledSamples generate_samples(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t d = spec.dim;
    const double radius = spec.spread * (1.0 - spec.overlap);
    Matrix centers(spec.num_classes, d);
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        auto row = centers.row(c);
        double n2 = 0.0;
        while (n2 == 0.0) {
            for (double& v : row) v = rng.normal();
            n2 = dot(row, row);
        }
        const double scale = radius / std::sqrt(n2);
        for (double& v : row) v *= scale;
    }
    const std::size_t n = spec.num_classes * spec.per_class;
    LabeledSamples out{Matrix(n, d), std::vector<Label>(n)};
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        for (std::size_t k = 0; k < spec.per_class; ++k) {
            const std::size_t i = c * spec.per_class + k;
            auto row = out.embeddings.row(i);
            const auto center = centers.row(c);
            for (std::size_t j = 0; j < d; ++j) row[j] = center[j] + spec.noise * rng.normal();
            out.labels[i] = static_cast<Label>(c);
        }
    }
    return out;
}

FeatureDataset generate_synthetic(const SyntheticSpec& spec) {
    return stratified_split(generate_samples(spec), spec.num_classes, spec.test_fraction, spec.seed);
}

FeatureDataset load_dataset(const DatasetSource& source) {
    FeatureDataset ds;
    if (source.kind == DatasetSource::Kind::synthetic) {
        SyntheticSpec spec = source.synthetic;
        spec.validate();
        ds = stratified_split(generate_samples(spec), spec.num_classes, source.test_fraction, source.split_seed);
    } else {
        LoadedSamples loaded = read_samples(source.path);
        ds = stratified_split(loaded.samples, loaded.num_classes, source.test_fraction, source.split_seed);
    }
    ds.validate();
    return ds;
}

void RunConfig::validate() const {
    if (budget_multiplier < 1) throw Error("budget multiplier K must be >= 1");
    if (cycles < 1) throw Error("cycles must be >= 1");
    if (seeds.empty()) throw Error("seed list must not be empty");
    if (jobs < 1) throw Error("jobs must be >= 1");
    strategy.validate();
    train.validate();
}

double imbalance(std::span<const Label> labels, std::size_t num_classes) {
    if (num_classes < 2) throw Error("imbalance needs at least 2 classes");
    if (labels.empty()) throw Error("imbalance of an empty labeled set");
    std::vector<std::size_t> counts(num_classes, 0);
    for (Label y : labels) {
        if (y >= num_classes) throw Error("label out of range");
        ++counts[y];
    }
    const double total = static_cast<double>(labels.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return std::clamp(1.0 - h / std::log2(static_cast<double>(num_classes)), 0.0, 1.0);
}

SeedRun run_single(const RunConfig& cfg, const FeatureDataset& dataset, const StrategySpec& strategy,
                   std::uint64_t seed) {
    const LabeledSamples& pool_data = dataset.train;
    if (dataset.test.size() == 0) throw Error("dataset has no test split to evaluate on");
    const std::size_t budget = cfg.budget_multiplier * dataset.num_classes;
    const Architecture arch{dataset.dim(), cfg.hidden_width, dataset.num_classes};

    SeedRun run{strategy.kind, seed, {}};
    Oracle oracle(pool_data);
    PoolState pool = PoolState::all_unlabeled(pool_data.size());
    std::vector<Label> revealed;
    std::optional<ClassifierHead> head;

    for (std::size_t t = 0; t < cfg.cycles; ++t) {
        CycleReport rep;
        rep.cycle = t;
        auto start = Clock::now();
        if (pool.unlabeled.size() < budget) {
            throw InfeasibleError("budget exhausted at cycle " + std::to_string(t) + ": " +
                                  std::to_string(pool.unlabeled.size()) + " unlabeled left, need " +
                                  std::to_string(budget));
        }
        if (t == 0) {
            rep.selected = initial_seed_selection(pool_data.size(), budget, derive_seed(seed, kSeedSet));
        } else {
            PoolState view = pool;
            if (cfg.pool_subsample > 0 && cfg.pool_subsample < pool.unlabeled.size()) {
                if (cfg.pool_subsample < budget) throw Error("pool_subsample is smaller than the budget");
                view.unlabeled.clear();
                for (std::size_t r : initial_seed_selection(pool.unlabeled.size(), cfg.pool_subsample,
                                                            derive_seed(seed, kSubsample, t))) {
                    view.unlabeled.push_back(pool.unlabeled[r]);
                }
            }
            SelectionOutcome sel = select(strategy, *head, pool_data, view, budget, derive_seed(seed, kSelect, t));
            rep.selected = std::move(sel.result.selected);
            rep.scores = sel.scores;
            if (cfg.dump_scores) rep.score_table = std::move(sel.table);
        }
        const std::vector<Label> labels = oracle.label(rep.selected);
        revealed.insert(revealed.end(), labels.begin(), labels.end());
        pool = update_pools(pool, rep.selected);
        rep.timing.select_ms = ms_since(start);

        start = Clock::now();
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(seed, kShuffle, t);
        head = train(ClassifierHead::initialized(arch, derive_seed(seed, kHeadInit, t)), pool_data, pool.labeled, tc)
                   .head;
        rep.timing.train_ms = ms_since(start);

        start = Clock::now();
        rep.accuracy = evaluate_accuracy(*head, dataset.test);
        rep.imbalance = imbalance(revealed, dataset.num_classes);
        rep.timing.eval_ms = ms_since(start);

        rep.labeled = pool.labeled.size();
        rep.oracle_reveals = oracle.revealed();
        rep.pool_hash = pool_hash(pool.labeled);
        if (!cfg.record_timing) rep.timing = {};
        run.cycles.push_back(std::move(rep));
    }
    return run;
}

ExperimentResult run_experiment(const RunConfig& cfg, const FeatureDataset& dataset) {
    cfg.validate();
    std::vector<StrategySpec> specs;
    if (cfg.sweep.empty()) {
        specs.push_back(cfg.strategy);
    } else {
        for (StrategyKind k : cfg.sweep) {
            StrategySpec s = cfg.strategy;
            s.kind = k;
            specs.push_back(s);
        }
    }
    struct Job {
        std::size_t spec;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < specs.size(); ++s) {
        for (std::uint64_t seed : cfg.seeds) jobs.push_back({s, seed});
    }

    ExperimentResult result;
    result.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                result.runs[j] = run_single(cfg, dataset, specs[jobs[j].spec], jobs[j].seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(cfg.jobs, jobs.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

std::vector<AggregateRow> aggregate(std::span<const std::vector<CycleReport>> per_seed) {
    if (per_seed.empty()) throw Error("nothing to aggregate");
    const std::size_t cycles = per_seed.front().size();
    for (const auto& r : per_seed) {
        if (r.size() != cycles) throw Error("ragged reports: seeds have different cycle counts");
    }
    const double n = static_cast<double>(per_seed.size());
    auto stats = [&](std::size_t t, auto field) {
        double sum = 0.0;
        for (const auto& r : per_seed) sum += field(r[t]);
        const double mean = sum / n;
        if (per_seed.size() < 2) return std::pair{mean, 0.0};
        double ss = 0.0;
        for (const auto& r : per_seed) ss += (field(r[t]) - mean) * (field(r[t]) - mean);
        return std::pair{mean, std::sqrt(ss / (n - 1.0))};
    };
    std::vector<AggregateRow> rows;
    for (std::size_t t = 0; t < cycles; ++t) {
        AggregateRow row;
        row.cycle = per_seed.front()[t].cycle;
        std::tie(row.accuracy_mean, row.accuracy_std) = stats(t, [](const CycleReport& c) { return c.accuracy; });
        std::tie(row.imbalance_mean, row.imbalance_std) = stats(t, [](const CycleReport& c) { return c.imbalance; });
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::vector<CycleReport>> runs_for(const ExperimentResult& result, StrategyKind kind) {
    std::vector<std::vector<CycleReport>> out;
    for (const SeedRun& r : result.runs) {
        if (r.strategy == kind) out.push_back(r.cycles);
    }
    return out;
}

std::vector<StrategyKind> strategies_in(const ExperimentResult& result) {
    std::vector<StrategyKind> out;
    for (const SeedRun& r : result.runs) {
        if (std::ranges::find(out, r.strategy) == out.end()) out.push_back(r.strategy);
    }
    return out;
}

}  // namespace decern
