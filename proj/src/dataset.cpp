#include "decern/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "byte_io.hpp"
#include "decern/error.hpp"
#include "decern/random.hpp"

namespace decern {

void FeatureDataset::validate() const {
    if (num_classes == 0) throw Error("dataset has no classes");
    if (train.size() == 0) throw Error("dataset has an empty train split");
    if (train.embeddings.rows() != train.labels.size() || test.embeddings.rows() != test.labels.size()) {
        throw Error("embedding rows do not match label count");
    }
    if (test.size() > 0 && test.dim() != train.dim()) throw Error("train/test dimension mismatch");
    std::vector<bool> seen(num_classes, false);
    for (const LabeledSamples* part : {&train, &test}) {
        for (Label y : part->labels) {
            if (y >= num_classes) throw Error("label " + std::to_string(y) + " out of range");
            seen[y] = true;
        }
        for (double v : part->embeddings.values()) {
            if (!std::isfinite(v)) throw Error("non-finite embedding value");
        }
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (!seen[c]) throw Error("class " + std::to_string(c) + " has no samples");
    }
}

FeatureDataset stratified_split(const LabeledSamples& all, std::size_t num_classes, double test_fraction,
                                std::uint64_t seed) {
    if (test_fraction < 0.0 || test_fraction >= 1.0) throw Error("test fraction must be in [0, 1)");
    std::vector<std::vector<std::size_t>> by_class(num_classes);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (all.labels[i] >= num_classes) throw Error("label out of range");
        by_class[all.labels[i]].push_back(i);
    }
    std::vector<bool> to_test(all.size(), false);
    Rng rng(derive_seed(seed, 0x5eed5b17));
    for (auto& members : by_class) {
        rng.shuffle(members);
        const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(members.size())));
        for (std::size_t k = 0; k < n_test && k + 1 < members.size(); ++k) to_test[members[k]] = true;
    }
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < all.size(); ++i) (to_test[i] ? test_idx : train_idx).push_back(i);

    FeatureDataset out;
    out.num_classes = num_classes;
    auto take = [&](const std::vector<std::size_t>& idx) {
        LabeledSamples part{all.embeddings.select_rows(idx), {}};
        for (std::size_t i : idx) part.labels.push_back(all.labels[i]);
        return part;
    };
    out.train = take(train_idx);
    out.test = take(test_idx);
    return out;
}

LabeledSamples merge_splits(const FeatureDataset& dataset) {
    const std::size_t d = dataset.dim();
    std::vector<double> values(dataset.train.embeddings.values().begin(), dataset.train.embeddings.values().end());
    values.insert(values.end(), dataset.test.embeddings.values().begin(), dataset.test.embeddings.values().end());
    LabeledSamples out{Matrix(dataset.train.size() + dataset.test.size(), d, std::move(values)), dataset.train.labels};
    out.labels.insert(out.labels.end(), dataset.test.labels.begin(), dataset.test.labels.end());
    return out;
}

void write_samples_binary(const std::filesystem::path& path, const LabeledSamples& samples,
                          std::size_t num_classes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(kDataMagic, 8);
    detail::put_le<std::uint32_t>(out, kDataVersion);
    detail::put_le<std::uint64_t>(out, samples.size());
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.dim()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(num_classes));
    for (double v : samples.embeddings.values()) detail::put_f64(out, v);
    for (Label y : samples.labels) detail::put_le<std::uint32_t>(out, y);
    out.flush();
    if (!out) throw Error("write failed for " + path.string());
}

LoadedSamples read_samples_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    detail::expect_magic(in, kDataMagic);
    const auto version = detail::get_le<std::uint32_t>(in, "version");
    if (version != kDataVersion) throw SchemaError("unsupported DCRNDATA version " + std::to_string(version));
    const auto n = detail::get_le<std::uint64_t>(in, "N");
    const auto d = detail::get_le<std::uint32_t>(in, "d");
    const auto nc = detail::get_le<std::uint32_t>(in, "N_c");
    if (d == 0 || nc == 0) throw SchemaError("DCRNDATA header has zero dimension or class count");

    // Reject absurd headers before allocating.
    const auto here = in.tellg();
    in.seekg(0, std::ios::end);
    const auto remaining = static_cast<std::uint64_t>(in.tellg() - here);
    in.seekg(here);
    if (remaining != n * (8ULL * d + 4ULL)) throw SchemaError("DCRNDATA payload size does not match header");

    std::vector<double> values(static_cast<std::size_t>(n) * d);
    for (double& v : values) v = detail::get_f64(in, "embeddings");
    LoadedSamples out{{Matrix(n, d, std::move(values)), std::vector<Label>(n)}, nc};
    for (Label& y : out.samples.labels) {
        y = detail::get_le<std::uint32_t>(in, "labels");
        if (y >= nc) throw SchemaError("label " + std::to_string(y) + " out of range");
    }
    return out;
}

void write_samples_csv(const std::filesystem::path& path, const LabeledSamples& samples) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (std::size_t j = 0; j < samples.dim(); ++j) out << 'f' << j << ',';
    out << "label\n";
    out.precision(17);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (double v : samples.embeddings.row(i)) out << v << ',';
        out << samples.labels[i] << '\n';
    }
    if (!out) throw Error("write failed for " + path.string());
}

LoadedSamples read_samples_csv(const std::filesystem::path& path, std::size_t num_classes) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty CSV " + path.string());
    const std::size_t columns = static_cast<std::size_t>(std::ranges::count(line, ',')) + 1;
    if (columns < 2) throw SchemaError("CSV needs at least one feature column and a label column");
    const std::size_t d = columns - 1;

    std::vector<double> values;
    std::vector<Label> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream row(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            try {
                if (col < d) {
                    values.push_back(std::stod(cell));
                } else if (col == d) {
                    const long y = std::stol(cell);
                    if (y < 0) throw SchemaError("negative label");
                    labels.push_back(static_cast<Label>(y));
                }
            } catch (const std::logic_error&) {
                throw SchemaError("bad CSV value '" + cell + "' on line " + std::to_string(line_no));
            }
            ++col;
        }
        if (col != columns) throw SchemaError("wrong column count on line " + std::to_string(line_no));
    }
    std::size_t nc = num_classes;
    if (nc == 0) {
        for (Label y : labels) nc = std::max<std::size_t>(nc, y + 1);
    }
    for (Label y : labels) {
        if (y >= nc) throw SchemaError("label " + std::to_string(y) + " out of range");
    }
    const std::size_t n = labels.size();
    return {{Matrix(n, d, std::move(values)), std::move(labels)}, nc};
}

LoadedSamples read_samples(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return read_samples_csv(path);
    return read_samples_binary(path);
}

}  // namespace decern
