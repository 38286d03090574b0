#include "decern/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decern/error.hpp"

namespace decern {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw Error("matrix shape " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                    " does not match " + std::to_string(values_.size()) + " values");
    }
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= rows_) throw Error("row index " + std::to_string(indices[r]) + " out of range");
        std::ranges::copy(row(indices[r]), out.row(r).begin());
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Vector softmax(std::span<const double> logits) {
    if (logits.empty()) throw Error("empty vector");
    const double mx = *std::ranges::max_element(logits);
    Vector out(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

std::size_t argmax(std::span<const double> xs) {
    if (xs.empty()) throw Error("empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] > xs[best]) best = i;
    }
    return best;
}

namespace {

void check_probability(std::span<const double> p) {
    if (p.empty()) throw Error("empty vector");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw Error("invalid probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) throw Error("invalid probability");
}

}  // namespace

double entropy(std::span<const double> p) {
    check_probability(p);
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return std::max(h, 0.0);
}

double cross_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw Error("length mismatch");
    check_probability(p);
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) h -= p[i] * std::log(std::max(q[i], kLogClamp));
    }
    return std::max(h, 0.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("length mismatch");
    const double aa = dot(a, a);
    const double bb = dot(b, b);
    if (aa == 0.0 || bb == 0.0) throw Error("zero vector");
    // sqrt(aa * bb) is exact for a == b, so identical inputs give exactly 1.
    double denom = std::sqrt(aa * bb);
    if (!std::isfinite(denom) || denom == 0.0) denom = std::sqrt(aa) * std::sqrt(bb);
    return std::clamp(dot(a, b) / denom, -1.0, 1.0);
}

MeanStd mean_std(std::span<const double> xs) {
    if (xs.empty()) throw Error("empty sequence");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / n)};
}

double skewness(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("skewness needs at least 2 values");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : xs) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    // Relative cutoff: a constant sequence leaves rounding residue in m2.
    if (m2 <= 1e-28 * mean * mean) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

Matrix pairwise_cosine_distance(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw Error("column count mismatch");
    auto norms = [](const Matrix& m, const char* name) {
        Vector out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out[i] = norm(m.row(i));
            if (out[i] == 0.0) {
                throw Error(std::string("zero vector at row ") + std::to_string(i) + " of " + name);
            }
        }
        return out;
    };
    const Vector na = norms(a, "A");
    const Vector nb = norms(b, "B");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double c = std::clamp(dot(a.row(i), b.row(j)) / (na[i] * nb[j]), -1.0, 1.0);
            out(i, j) = 1.0 - c;
        }
    }
    return out;
}

}  // namespace decern
