#pragma once

#include <cstdint>
#include <vector>

#include "wola/dataset.hpp"

namespace wola {

struct PartitionOptions {
    /// When true, every shard receives floor(N/num_workers) samples (the
    /// first N mod num_workers shards get one more) and the Dirichlet draw
    /// shapes each worker's class mix. When false, the Dirichlet draw is
    /// taken per class over workers and shard sizes float.
    bool equal_size = true;
    int max_redraws = 100;
};

/// Label-skew partition of ds into num_workers shards driven by a
/// symmetric Dirichlet(alpha) draw. The shards are an exact partition of
/// ds: no sample is dropped or duplicated, and per-class counts sum to the
/// global class counts. Deterministic per (ds, alpha, seed).
///
/// A draw that leaves some worker empty is redrawn up to
/// PartitionOptions::max_redraws times before reporting a degenerate
/// partition.
std::vector<WorkerShard> dirichlet_partition(const LabeledDataset& ds, int num_workers,
                                             double alpha, std::uint64_t seed,
                                             const PartitionOptions& opts = {});

/// Seeded label-stratified split; returns {train, test}. test_fraction of
/// each class (largest-remainder rounded) goes to the test side.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

}  // namespace wola
