#pragma once

// Seeded fixture generators shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decern/classifier.hpp"
#include "decern/dataset.hpp"
#include "decern/numerics.hpp"
#include "decern/random.hpp"

namespace testing {

using decern::Matrix;
using decern::Rng;
using decern::Vector;

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (double& x : v) x = scale * rng.normal();
    return v;
}

// Strictly positive probability vector.
inline Vector random_probability(Rng& rng, std::size_t n) {
    Vector p(n);
    double sum = 0.0;
    for (double& x : p) {
        x = 0.01 + rng.uniform();
        sum += x;
    }
    for (double& x : p) x /= sum;
    return p;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& x : m.values()) x = scale * rng.normal();
    return m;
}

// Head with parameters large enough to give non-uniform predictions.
inline decern::ClassifierHead random_head(const decern::Architecture& arch, std::uint64_t seed, double scale = 1.0) {
    decern::ClassifierHead head(arch);
    Rng rng(seed);
    for (double& w : head.parameters()) w = scale * rng.normal();
    return head;
}

// Gaussian blobs around well separated centers, `per_class` rows per class.
inline decern::LabeledSamples blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double spread,
                                    double noise, std::uint64_t seed) {
    Rng rng(seed);
    const Matrix centers = random_matrix(rng, classes, dim, spread);
    decern::LabeledSamples out{Matrix(classes * per_class, dim), std::vector<decern::Label>(classes * per_class)};
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t k = 0; k < per_class; ++k) {
            const std::size_t i = c * per_class + k;
            for (std::size_t j = 0; j < dim; ++j) out.embeddings(i, j) = centers(c, j) + noise * rng.normal();
            out.labels[i] = static_cast<decern::Label>(c);
        }
    }
    return out;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("decern_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
