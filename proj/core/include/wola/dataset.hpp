#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wola/vector_ops.hpp"

namespace wola {

/// Labeled classification dataset. Labels are class indices in [0, C).
struct LabeledDataset {
    std::vector<Vec> features;
    std::vector<int> labels;
    int num_classes = 0;
    std::vector<std::string> class_names;  // empty for synthetic data

    std::size_t size() const { return features.size(); }
    std::size_t feature_dim() const { return features.empty() ? 0 : features.front().size(); }

    /// Per-class instance counts, length num_classes.
    std::vector<std::int64_t> class_counts() const;
};

/// One worker's local dataset plus its per-class bookkeeping.
struct WorkerShard {
    LabeledDataset data;
    std::vector<std::int64_t> class_counts;  // length C, sums to size()

    std::size_t size() const { return data.size(); }
};

WorkerShard make_shard(LabeledDataset data);

/// Length-C probability vector on the simplex.
using LabelDistribution = Vec;

/// Throws invalid_input unless probs is on the simplex within tol.
void check_simplex(const LabelDistribution& probs, double tol = 1e-9);

/// Empirical label distribution of a shard: counts / size. Errors on an
/// empty shard.
LabelDistribution label_distribution(const WorkerShard& shard);

/// Pooled label distribution over several shards: sum of counts / sum of
/// sizes. Errors when all shards are empty.
LabelDistribution global_distribution(const std::vector<WorkerShard>& shards);

struct SyntheticSpec {
    int num_classes = 2;
    int feature_dim = 2;
    int samples_per_class = 100;
    double class_separation = 4.0;
};

/// Isotropic unit-variance Gaussian blobs, one per class, with class means
/// pairwise class_separation apart (exactly so when feature_dim >= C-1;
/// adjacent-neighbour spacing on a circle otherwise). Deterministic per seed.
LabeledDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Class mean positions used by generate_synthetic.
std::vector<Vec> synthetic_class_means(const SyntheticSpec& spec);

/// Draws `count_per_class[c]` fresh samples of each class from the same
/// blob model; used to build test sets matching a target label distribution.
LabeledDataset sample_synthetic_by_counts(const SyntheticSpec& spec,
                                          const std::vector<std::int64_t>& count_per_class,
                                          std::uint64_t seed);

/// Integer class counts proportional to a probability vector, summing to
/// total exactly (largest-remainder rounding).
std::vector<std::int64_t> proportional_counts(const Vec& probs, std::int64_t total);

/// Loads a comma-separated dataset. A header row is auto-detected (first
/// row with a non-numeric cell in a feature column). label_column < 0
/// selects the last column. String labels are mapped to indices in order
/// of first appearance; all-integer label columns are taken as indices
/// directly. Malformed rows raise parse_error with the line number.
LabeledDataset load_csv_dataset(const std::string& path, int label_column = -1);

}  // namespace wola
