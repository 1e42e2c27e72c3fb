#include "wola/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wola/error.hpp"
#include "wola/rng.hpp"

namespace wola {

namespace {

// Sample indices grouped by class, each group shuffled with its own stream.
std::vector<std::vector<std::size_t>> shuffled_class_pools(const LabeledDataset& ds,
                                                           std::uint64_t seed,
                                                           std::uint64_t attempt) {
    std::vector<std::vector<std::size_t>> pools(ds.num_classes);
    for (std::size_t k = 0; k < ds.size(); ++k) pools[ds.labels[k]].push_back(k);
    for (int c = 0; c < ds.num_classes; ++c) {
        Rng rng = make_stream(seed, "partition-shuffle",
                              attempt * static_cast<std::uint64_t>(ds.num_classes) + c);
        rng.shuffle(pools[c]);
    }
    return pools;
}

std::vector<WorkerShard> build_shards(const LabeledDataset& ds,
                                      const std::vector<std::vector<std::size_t>>& assignment) {
    std::vector<WorkerShard> shards;
    shards.reserve(assignment.size());
    for (const auto& idxs : assignment) {
        LabeledDataset local;
        local.num_classes = ds.num_classes;
        local.class_names = ds.class_names;
        local.features.reserve(idxs.size());
        local.labels.reserve(idxs.size());
        for (std::size_t k : idxs) {
            local.features.push_back(ds.features[k]);
            local.labels.push_back(ds.labels[k]);
        }
        shards.push_back(make_shard(std::move(local)));
    }
    return shards;
}

// Per-class Dirichlet over workers; shard sizes are whatever the draw gives.
std::vector<std::vector<std::size_t>> assign_proportional(const LabeledDataset& ds,
                                                          int num_workers, double alpha,
                                                          std::uint64_t seed,
                                                          std::uint64_t attempt) {
    auto pools = shuffled_class_pools(ds, seed, attempt);
    std::vector<std::vector<std::size_t>> assignment(num_workers);
    for (int c = 0; c < ds.num_classes; ++c) {
        Rng rng = make_stream(seed, "partition-dirichlet",
                              attempt * static_cast<std::uint64_t>(ds.num_classes) + c);
        const Vec proportions = rng.dirichlet_symmetric(alpha, num_workers);
        const auto counts =
            proportional_counts(proportions, static_cast<std::int64_t>(pools[c].size()));
        std::size_t cursor = 0;
        for (int i = 0; i < num_workers; ++i) {
            for (std::int64_t k = 0; k < counts[i]; ++k) {
                assignment[i].push_back(pools[c][cursor++]);
            }
        }
    }
    return assignment;
}

// Fixed shard sizes; each worker draws a class mix and fills its slots from
// the remaining per-class supply (falling back to whatever is left once its
// preferred classes run out).
std::vector<std::vector<std::size_t>> assign_equal_size(const LabeledDataset& ds,
                                                        int num_workers, double alpha,
                                                        std::uint64_t seed,
                                                        std::uint64_t attempt) {
    auto pools = shuffled_class_pools(ds, seed, attempt);
    std::vector<std::size_t> remaining(ds.num_classes);
    for (int c = 0; c < ds.num_classes; ++c) remaining[c] = pools[c].size();

    const std::int64_t n = static_cast<std::int64_t>(ds.size());
    std::vector<std::vector<std::size_t>> assignment(num_workers);
    for (int i = 0; i < num_workers; ++i) {
        const std::int64_t quota =
            n / num_workers + (i < static_cast<int>(n % num_workers) ? 1 : 0);
        Rng rng = make_stream(seed, "partition-worker-mix",
                              attempt * static_cast<std::uint64_t>(num_workers) + i);
        const Vec mix = rng.dirichlet_symmetric(alpha, ds.num_classes);
        for (std::int64_t slot = 0; slot < quota; ++slot) {
            double available = 0.0;
            for (int c = 0; c < ds.num_classes; ++c) {
                if (remaining[c] > 0) available += mix[c];
            }
            int chosen = -1;
            if (available > 0.0) {
                double r = rng.uniform() * available;
                for (int c = 0; c < ds.num_classes; ++c) {
                    if (remaining[c] == 0) continue;
                    r -= mix[c];
                    if (r <= 0.0) {
                        chosen = c;
                        break;
                    }
                }
            }
            if (chosen < 0) {
                // Preferred classes exhausted (mix mass stuck on empty
                // pools); take from the largest remaining pool.
                std::size_t best = 0;
                for (int c = 0; c < ds.num_classes; ++c) {
                    if (remaining[c] > best) {
                        best = remaining[c];
                        chosen = c;
                    }
                }
                if (chosen < 0) throw invalid_input("equal-size partition: supply exhausted");
            }
            assignment[i].push_back(pools[chosen][pools[chosen].size() - remaining[chosen]]);
            --remaining[chosen];
        }
    }
    return assignment;
}

}  // namespace

std::vector<WorkerShard> dirichlet_partition(const LabeledDataset& ds, int num_workers,
                                             double alpha, std::uint64_t seed,
                                             const PartitionOptions& opts) {
    if (num_workers < 1) throw invalid_input("dirichlet_partition: num_workers must be >= 1");
    if (!(alpha > 0.0)) throw invalid_input("dirichlet_partition: alpha must be positive");
    if (ds.size() == 0) throw invalid_input("dirichlet_partition: empty dataset");
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            throw invalid_input("dirichlet_partition: class " + std::to_string(c) +
                                " has no instances");
        }
    }
    if (static_cast<std::size_t>(num_workers) > ds.size()) {
        throw invalid_input("dirichlet_partition: more workers than samples");
    }

    for (int attempt = 0; attempt <= opts.max_redraws; ++attempt) {
        auto assignment =
            opts.equal_size
                ? assign_equal_size(ds, num_workers, alpha, seed, attempt)
                : assign_proportional(ds, num_workers, alpha, seed, attempt);
        const bool degenerate = std::any_of(assignment.begin(), assignment.end(),
                                            [](const auto& a) { return a.empty(); });
        if (!degenerate) return build_shards(ds, assignment);
    }
    throw invalid_input("dirichlet_partition: degenerate partition after " +
                        std::to_string(opts.max_redraws) + " redraws");
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
        throw invalid_input("stratified_split: test_fraction must be in [0, 1)");
    }
    auto pools = shuffled_class_pools(ds, seed, /*attempt=*/0);
    LabeledDataset train, test;
    train.num_classes = test.num_classes = ds.num_classes;
    train.class_names = test.class_names = ds.class_names;
    for (int c = 0; c < ds.num_classes; ++c) {
        const auto n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(pools[c].size())));
        for (std::size_t k = 0; k < pools[c].size(); ++k) {
            auto& side = k < n_test ? test : train;
            side.features.push_back(ds.features[pools[c][k]]);
            side.labels.push_back(ds.labels[pools[c][k]]);
        }
    }
    return {std::move(train), std::move(test)};
}

}  // namespace wola
