#pragma once

#include "wola/vector_ops.hpp"

namespace wola {

struct WeiszfeldOptions {
    double tol = 1e-9;       // stop when the iterate moves less than this in l2
    int max_iter = 100000;
    double smoothing = 1e-12;  // denominator perturbation at coincident points
};

/// Geometric median of the rows: the point minimising the sum of l2
/// distances. Smoothed Weiszfeld iteration started at the coordinate-wise
/// mean; every iterate is a convex combination of the rows, so the output
/// stays inside their convex hull (and on the simplex when the rows are
/// probability distributions).
///
/// Throws convergence_failure (carrying the last iterate) if max_iter is
/// exhausted before the step size drops below tol.
Vec weiszfeld_geometric_median(const VectorBatch& rows,
                               const WeiszfeldOptions& opts = {});

/// Sum of l2 distances from x to the rows; the objective the median minimises.
double geometric_median_objective(const Vec& x, const VectorBatch& rows);

}  // namespace wola
