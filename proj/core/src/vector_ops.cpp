#include "wola/vector_ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wola/error.hpp"

namespace wola {

void check_finite(const Vec& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw invalid_input(std::string(what) + " contains a non-finite entry");
        }
    }
}

std::size_t batch_dim(const VectorBatch& b) {
    if (b.empty()) throw invalid_input("batch must contain at least one row");
    const std::size_t d = b.front().size();
    for (const auto& row : b) {
        if (row.size() != d) throw invalid_input("batch rows have mismatched dimensions");
    }
    return d;
}

double l2_norm(const Vec& v) {
    check_finite(v, "l2_norm input");
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double sq_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw invalid_input("sq_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double l2_distance(const Vec& a, const Vec& b) { return std::sqrt(sq_distance(a, b)); }

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw invalid_input("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

std::vector<std::vector<double>> pairwise_sq_distances(const VectorBatch& b) {
    batch_dim(b);
    const std::size_t n = b.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = sq_distance(b[i], b[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    return m;
}

Vec coordinate_median(const VectorBatch& b) {
    const std::size_t d = batch_dim(b);
    const std::size_t n = b.size();
    Vec out(d);
    std::vector<double> column(n);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t i = 0; i < n; ++i) column[i] = b[i][k];
        std::sort(column.begin(), column.end());
        out[k] = (n % 2 == 1) ? column[n / 2]
                              : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    }
    return out;
}

Vec coordinate_mean(const VectorBatch& b) {
    const std::size_t d = batch_dim(b);
    Vec out(d, 0.0);
    for (const auto& row : b) add_inplace(out, row);
    scale_inplace(out, 1.0 / static_cast<double>(b.size()));
    return out;
}

Vec weighted_mean(const VectorBatch& b, const std::vector<double>& weights) {
    const std::size_t d = batch_dim(b);
    if (weights.size() != b.size()) throw invalid_input("weighted_mean: weight count mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw invalid_input("weighted_mean: negative weight");
        wsum += w;
    }
    if (wsum <= 0.0) throw invalid_input("weighted_mean: weights must have positive sum");
    Vec out(d, 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) axpy_inplace(out, weights[i] / wsum, b[i]);
    return out;
}

void add_inplace(Vec& a, const Vec& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
}

void axpy_inplace(Vec& a, double s, const Vec& b) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += s * b[k];
}

void scale_inplace(Vec& a, double s) {
    for (double& x : a) x *= s;
}

Vec scaled(const Vec& a, double s) {
    Vec out(a);
    scale_inplace(out, s);
    return out;
}

}  // namespace wola
