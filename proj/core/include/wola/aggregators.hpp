#pragma once

#include <string>

#include "wola/geometric_median.hpp"
#include "wola/vector_ops.hpp"

namespace wola {

/// The n per-worker updates of one round plus the robustness parameter
/// handed to f-aware rules. declared_f is a configuration input; it may
/// differ from the number of actually-Byzantine rows.
struct UpdateSet {
    VectorBatch updates;
    int declared_f = 0;

    int count() const { return static_cast<int>(updates.size()); }
    void validate() const;
};

Vec agg_mean(const UpdateSet& u);
Vec agg_cwmed(const UpdateSet& u);

/// Per coordinate, drop the declared_f largest and declared_f smallest
/// values and average the rest. Requires n > 2*declared_f.
Vec agg_cwtm(const UpdateSet& u);

Vec agg_gm(const UpdateSet& u, const WeiszfeldOptions& opts = {});

/// score_i = sum of the (n - declared_f - 2) smallest squared distances
/// from row i to the other rows. Requires n >= declared_f + 3.
std::vector<double> krum_scores(const UpdateSet& u);

/// The single minimum-score row (ties to the lowest index).
Vec agg_krum(const UpdateSet& u);

/// Unweighted average of the n - declared_f rows with smallest scores;
/// score ties are broken by row index.
Vec agg_mkrum(const UpdateSet& u);

/// Dispatch by rule name: "mean" | "cwmed" | "cwtm" | "gm" | "krum" | "mkrum".
Vec aggregate(const std::string& name, const UpdateSet& u, const WeiszfeldOptions& gm_opts = {});

bool is_known_aggregator(const std::string& name);

}  // namespace wola
