#pragma once

#include <optional>
#include <string>

#include "wola/dataset.hpp"
#include "wola/vector_ops.hpp"

namespace wola {

/// Standard normal quantile, bisected on erf to ~1e-12.
double normal_quantile(double p);

/// The attack exponent z = quantile((n-f-s)/(n-f)) with s = floor(n/2)+1-f,
/// floored at zero.
double alie_z(int n, int f);

/// All f Byzantine rows equal mean - z * (coordinate-wise population std)
/// of the honest rows. Requires at least two honest rows.
VectorBatch attack_alie(const VectorBatch& honest, int n, int f,
                        std::optional<double> z_override = std::nullopt);

/// All f rows equal -epsilon * (honest mean).
VectorBatch attack_foe(const VectorBatch& honest, int f, double epsilon = 1.1);

/// All f rows equal the negated honest mean (FOE at epsilon = 1).
VectorBatch attack_sf(const VectorBatch& honest, int f);

/// Index of the honest row every Byzantine will replicate: the "most
/// surrounded outlier". For each pair (i, j), row j earns
/// min(f, rank_i(j)) * dist(row_j, center), where rank_i orders rows by
/// decreasing distance from row i (self ranks last, ties by row index);
/// the highest total wins (ties to the lowest index).
int mimic_select(const VectorBatch& honest, int f);

/// f copies of the selected honest row.
VectorBatch attack_mimic(const VectorBatch& honest, int f);

/// The label-flipping relabel map y -> C-1-y applied to a copy of the
/// dataset. Byzantine workers under this attack run the ordinary honest
/// training step on the relabeled shard.
LabeledDataset flip_labels(const LabeledDataset& ds);
WorkerShard flip_labels(const WorkerShard& shard);

bool is_known_attack(const std::string& name);  // none|alie|foe|sf|lf|mimic

}  // namespace wola
