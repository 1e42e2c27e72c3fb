#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wola/dataset.hpp"
#include "wola/geometric_median.hpp"
#include "wola/model.hpp"

namespace wola {

/// The shared training objective: a probability vector over classes, fixed
/// once before training and broadcast to every worker.
struct TrainingObjective {
    LabelDistribution q;
};

enum class ObjectiveMode { global, uniform, provided };

ObjectiveMode objective_mode_from_string(const std::string& s);
std::string to_string(ObjectiveMode m);

/// Per-sample loss weights q[y]/p_i[y] for the given labels. p_i must be
/// the full-shard empirical distribution of the worker the labels came
/// from; a label whose local probability is zero is rejected, since such a
/// label cannot originate from that shard.
std::vector<double> wola_weights(const TrainingObjective& q, const LabelDistribution& p_i,
                                 std::span<const int> labels);

/// Per-class weight table q[c]/p_i[c] (zero where the class is locally
/// absent, in which case the weight is never looked up).
std::vector<double> wola_class_weights(const TrainingObjective& q, const LabelDistribution& p_i);

/// Builds the training objective.
///   global   - size-weighted mean of the honest local distributions (= p)
///   uniform  - (1/C, ..., 1/C)
///   provided - pass-through after simplex validation
TrainingObjective build_objective(ObjectiveMode mode,
                                  const std::vector<LabelDistribution>& honest_dists,
                                  const std::vector<std::int64_t>& sizes,
                                  const std::optional<LabelDistribution>& provided,
                                  int num_classes);

/// The strongest distribution-reporting attack: honest workers submit
/// their true local distributions; the f Byzantine workers each submit a
/// one-hot vector on the class where the (unweighted) honest mean is
/// smallest (ties to the lowest index). Returns all n submissions, honest
/// first.
std::vector<LabelDistribution> objective_attack_worst(
    const std::vector<LabelDistribution>& honest_dists, int f, int n);

/// Worst-case l1 deviation of mean aggregation under the attack above:
/// (f/n) * (2 - 2*min_c u[c]).
double objective_deviation_bound(const LabelDistribution& u, int f, int n);

/// Geometric-median aggregation of submitted distributions. The output is
/// a convex combination of simplex points, hence itself a distribution.
TrainingObjective aggregate_objective_gm(const std::vector<LabelDistribution>& submissions,
                                         const WeiszfeldOptions& opts = {});

/// Mean gradient of the pointwise loss over the class-c samples only.
ParamVector class_gradient(const ModelSpec& spec, const ParamVector& theta,
                           const LabeledDataset& ds, int c);

/// a.b / (||a|| ||b||); rejects zero vectors.
double cosine_similarity(const Vec& a, const Vec& b);

double l1_distance(const Vec& a, const Vec& b);

}  // namespace wola
