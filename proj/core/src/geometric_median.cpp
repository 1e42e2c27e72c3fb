#include "wola/geometric_median.hpp"

#include <cmath>

#include "wola/error.hpp"

namespace wola {

double geometric_median_objective(const Vec& x, const VectorBatch& rows) {
    double s = 0.0;
    for (const auto& r : rows) s += l2_distance(x, r);
    return s;
}

Vec weiszfeld_geometric_median(const VectorBatch& rows, const WeiszfeldOptions& opts) {
    batch_dim(rows);
    if (!(opts.tol > 0.0)) throw invalid_input("weiszfeld: tol must be positive");
    if (opts.max_iter < 1) throw invalid_input("weiszfeld: max_iter must be positive");
    if (rows.size() == 1) return rows.front();

    Vec x = coordinate_mean(rows);
    Vec next(x.size());
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        double weight_sum = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        for (const auto& r : rows) {
            const double w = 1.0 / (l2_distance(x, r) + opts.smoothing);
            weight_sum += w;
            axpy_inplace(next, w, r);
        }
        scale_inplace(next, 1.0 / weight_sum);
        const double step = l2_distance(next, x);
        x.swap(next);
        if (step < opts.tol) return x;
    }
    throw convergence_failure("weiszfeld: max_iter exhausted before reaching tol", x);
}

}  // namespace wola
