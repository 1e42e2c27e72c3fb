#pragma once

#include <cstddef>
#include <vector>

namespace wola {

/// Flat real vector. Model parameters, updates, momenta and label
/// distributions are all carried in this representation.
using Vec = std::vector<double>;

/// A batch of equal-dimension rows (the n updates fed to an aggregator,
/// the honest updates seen by an attack, ...).
using VectorBatch = std::vector<Vec>;

/// Throws invalid_input if any entry is NaN or infinite.
void check_finite(const Vec& v, const char* what = "vector");

/// Throws invalid_input unless all rows share one dimension and the batch
/// is non-empty. Returns that dimension.
std::size_t batch_dim(const VectorBatch& b);

double l2_norm(const Vec& v);
double l2_distance(const Vec& a, const Vec& b);
double sq_distance(const Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b);

/// count x count symmetric matrix of squared distances, zero diagonal.
std::vector<std::vector<double>> pairwise_sq_distances(const VectorBatch& b);

/// Per-coordinate median; even counts use the midpoint of the two middle
/// order statistics.
Vec coordinate_median(const VectorBatch& b);

/// Plain coordinate-wise arithmetic mean.
Vec coordinate_mean(const VectorBatch& b);

/// Weighted coordinate-wise mean; weights need not be normalised but must
/// have a positive sum.
Vec weighted_mean(const VectorBatch& b, const std::vector<double>& weights);

// Small in-place helpers shared by the optimizer and aggregators.
void add_inplace(Vec& a, const Vec& b);              // a += b
void axpy_inplace(Vec& a, double s, const Vec& b);   // a += s*b
void scale_inplace(Vec& a, double s);                // a *= s
Vec scaled(const Vec& a, double s);

}  // namespace wola
