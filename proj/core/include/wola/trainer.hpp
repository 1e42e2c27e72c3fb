#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wola/aggregators.hpp"
#include "wola/dataset.hpp"
#include "wola/model.hpp"
#include "wola/objective.hpp"
#include "wola/rng.hpp"
#include "wola/schedule.hpp"

namespace wola {

enum class LossMode { standard, wola, wola_dagger };
LossMode loss_mode_from_string(const std::string& s);
std::string to_string(LossMode m);

/// Whether the norm clip is applied to the stochastic gradient (before the
/// momentum update) or to the momentum itself.
enum class ClipTarget { gradient, momentum };

/// g unchanged when ||g|| <= c, otherwise rescaled onto the radius-c ball.
Vec clip_to_norm(Vec g, double c);

struct OptimizerOptions {
    double beta = 0.9;
    ScheduleSpec schedule;
    double clip = 5.0;  // <= 0 disables clipping
    double l2_reg = 1e-4;
    int batch_size = 128;  // <= 0 selects full-batch gradients
    int rounds = 300;
    ClipTarget clip_target = ClipTarget::gradient;
};

/// Per-round metrics row. wall_clock_ms is measurement-only and is not part
/// of the serialised record, so replays stay byte-identical.
struct RoundRecord {
    int t = 0;
    double test_accuracy = 0.0;
    double gradient_dissimilarity = 0.0;
    double mean_honest_loss = 0.0;
    double aggregate_norm = 0.0;
    std::int64_t wall_clock_ms = 0;
};

/// Mean squared l2 deviation of the honest updates from their size-weighted
/// mean. Sizes may be empty for the unweighted case.
double gradient_dissimilarity(const VectorBatch& honest_updates,
                              const std::vector<std::int64_t>& sizes = {});

/// Fraction of test samples whose argmax prediction matches the label.
double test_accuracy(const ModelSpec& spec, const ParamVector& theta,
                     const LabeledDataset& test_set);

/// Everything fixed for one training run.
struct TrainerSetup {
    ModelSpec model;
    std::vector<WorkerShard> honest_shards;
    std::vector<WorkerShard> byz_shards;  // one per Byzantine worker (lf/none attacks)
    LabeledDataset test_set;
    std::optional<TrainingObjective> objective;  // engaged for wola losses
    std::string aggregator = "mean";
    std::string preaggregator = "none";
    int foundationfl_m = 0;  // <= 0 selects the n/2 default
    std::string attack = "none";
    double foe_epsilon = 1.1;
    std::optional<double> alie_z_override;
    OptimizerOptions opt;
    WeiszfeldOptions gm;
    std::uint64_t seed = 1;
    int declared_f = -1;  // -1: use the true Byzantine count
    int threads = 1;      // <= 0 selects hardware concurrency
};

/// Robust distributed stochastic heavy-ball loop. Each round: honest
/// workers compute clipped stochastic gradients and momenta; the attack
/// forms the f Byzantine rows with full knowledge of the honest momenta;
/// the server pre-aggregates, aggregates and takes the model step; metrics
/// are evaluated on the post-step model.
class Trainer {
public:
    explicit Trainer(TrainerSetup setup);

    RoundRecord run_round();
    std::vector<RoundRecord> run();  // opt.rounds rounds from the current state

    const ParamVector& params() const { return theta_; }
    int round() const { return round_; }
    int worker_count() const { return static_cast<int>(workers_.size()); }
    int byzantine_count() const { return static_cast<int>(setup_.byz_shards.size()); }
    const VectorBatch& honest_momenta() const { return honest_momenta_; }

private:
    struct WorkerState {
        const WorkerShard* shard = nullptr;
        std::vector<double> class_weights;  // per-label loss weight table
        Vec momentum;
        Rng batch_rng;
        bool byzantine = false;
    };

    Vec worker_step(WorkerState& w);
    void honest_phase();
    VectorBatch byzantine_rows();

    TrainerSetup setup_;
    std::vector<WorkerState> workers_;  // honest first, Byzantine last
    std::vector<std::int64_t> honest_sizes_;
    ParamVector theta_;
    VectorBatch honest_momenta_;  // refreshed every round, honest order
    int round_ = 0;
    int threads_ = 1;
};

}  // namespace wola
