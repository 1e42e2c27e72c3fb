#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wola/config.hpp"
#include "wola/trainer.hpp"

namespace wola {

/// One seed's training run plus its run-averaged metrics.
struct SeedRunResult {
    std::uint64_t seed = 0;
    std::vector<RoundRecord> records;
    double avg_accuracy = 0.0;        // mean over rounds
    double avg_dissimilarity = 0.0;   // mean over rounds
    double final_accuracy = 0.0;
};

/// Mean and population standard deviation across seeds of the run-averaged
/// metrics (the "(s.d.)" convention used in result tables).
struct ExperimentSummary {
    std::vector<SeedRunResult> per_seed;
    double accuracy_mean = 0.0;
    double accuracy_sd = 0.0;
    double dissimilarity_mean = 0.0;
    double dissimilarity_sd = 0.0;
};

/// Builds data, partitions, constructs the training objective (including
/// the attacked-objective path for wola_dagger) and runs one seed.
SeedRunResult run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// All seeds of the config, in order.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// Materialised trainer for one seed; exposed for tests that need to poke
/// at the assembled pieces.
Trainer build_trainer(const ExperimentConfig& cfg, std::uint64_t seed);

/// Round CSV: header + one row per round, no timing columns, so identical
/// configurations reproduce files byte for byte.
void write_round_csv(std::ostream& out, const std::vector<RoundRecord>& records);

/// Writes rounds_seed<k>.csv per seed plus summary.json under out_dir.
/// Returns 0 when every seed completed.
int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir);

/// Cross-product over one config field. Writes per-cell outputs under
/// out_dir/<axis>=<value>/ and a sweep_summary.csv. Returns 0 when every
/// cell completed.
int cmd_sweep(const ExperimentConfig& base, const std::string& axis,
              const std::vector<std::string>& values, const std::string& out_dir);

struct BoundCheckReport {
    double worst_attack_gap = 0.0;   // |realized - bound| under the worst attack
    double max_random_ratio = 0.0;   // max realized/bound over random adversaries
    bool tight = false;              // worst attack achieves the bound (1e-12)
    bool all_below = false;          // random adversaries never exceed the bound
};

/// Samples random honest distribution sets, runs random adversaries and
/// the worst-case construction, and compares realized mean-aggregation
/// deviation against the closed-form bound.
BoundCheckReport bound_check(int n, int f, int trials, std::uint64_t seed, int num_classes = 10);

struct Fig1Options {
    int steps = 400;
    double lr = 0.2;
    ModelKind kind = ModelKind::mlp;
    int hidden_dim = 16;
    Activation activation = Activation::tanh;
    double test_fraction = 0.3;
    double l2_reg = 0.0;
    std::uint64_t seed = 1;
};

struct Fig1Result {
    double final_test_accuracy = 0.0;
    std::vector<double> min_pairwise_cosine;  // per class pair, min over steps
    std::vector<std::pair<int, int>> pairs;
};

/// Full-batch gradient-descent training on a CSV dataset with a stratified
/// train/test split, logging per step the training loss, test accuracy and
/// the cosine similarity between every pair of class gradients.
Fig1Result run_fig1(const std::string& csv_path, const std::string& out_path,
                    const Fig1Options& opts);

/// "%.17g"-style shortest-round-trip formatting used in all CSV output.
std::string format_double(double v);

}  // namespace wola
