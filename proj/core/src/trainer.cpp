#include "wola/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "wola/attacks.hpp"
#include "wola/error.hpp"
#include "wola/preaggregators.hpp"

namespace wola {

LossMode loss_mode_from_string(const std::string& s) {
    if (s == "standard") return LossMode::standard;
    if (s == "wola") return LossMode::wola;
    if (s == "wola_dagger") return LossMode::wola_dagger;
    throw invalid_input("unknown loss mode: " + s);
}

std::string to_string(LossMode m) {
    switch (m) {
        case LossMode::standard: return "standard";
        case LossMode::wola: return "wola";
        case LossMode::wola_dagger: return "wola_dagger";
    }
    return "standard";
}

Vec clip_to_norm(Vec g, double c) {
    if (!(c > 0.0)) throw invalid_input("clip_to_norm: c must be positive");
    const double norm = l2_norm(g);
    if (norm > c) scale_inplace(g, c / norm);
    return g;
}

double gradient_dissimilarity(const VectorBatch& honest_updates,
                              const std::vector<std::int64_t>& sizes) {
    batch_dim(honest_updates);
    Vec mean;
    if (sizes.empty()) {
        mean = coordinate_mean(honest_updates);
    } else {
        if (sizes.size() != honest_updates.size()) {
            throw invalid_input("gradient_dissimilarity: sizes length mismatch");
        }
        std::vector<double> w(sizes.begin(), sizes.end());
        mean = weighted_mean(honest_updates, w);
    }
    double acc = 0.0;
    for (const auto& row : honest_updates) acc += sq_distance(row, mean);
    return acc / static_cast<double>(honest_updates.size());
}

double test_accuracy(const ModelSpec& spec, const ParamVector& theta,
                     const LabeledDataset& test_set) {
    if (test_set.size() == 0) throw invalid_input("test_accuracy: empty test set");
    std::size_t correct = 0;
    for (std::size_t k = 0; k < test_set.size(); ++k) {
        if (predict(spec, theta, test_set.features[k]) == test_set.labels[k]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(test_set.size());
}

Trainer::Trainer(TrainerSetup setup) : setup_(std::move(setup)) {
    setup_.model.validate();
    if (setup_.honest_shards.empty()) throw invalid_input("Trainer: no honest shards");
    if (!is_known_aggregator(setup_.aggregator)) {
        throw invalid_input("unknown aggregator: " + setup_.aggregator);
    }
    if (!is_known_preaggregator(setup_.preaggregator)) {
        throw invalid_input("unknown pre-aggregator: " + setup_.preaggregator);
    }
    if (!is_known_attack(setup_.attack)) throw invalid_input("unknown attack: " + setup_.attack);
    if (!(setup_.opt.beta >= 0.0 && setup_.opt.beta < 1.0)) {
        throw invalid_input("Trainer: need 0 <= beta < 1");
    }

    const int h = static_cast<int>(setup_.honest_shards.size());
    const int f = static_cast<int>(setup_.byz_shards.size());
    const int n = h + f;
    if (setup_.declared_f < 0) setup_.declared_f = f;
    if (2 * setup_.declared_f >= n || 2 * f >= n) {
        throw invalid_input("Trainer: Byzantine workers must stay below n/2");
    }
    // Label flipping relabels the Byzantine shards once; the workers then
    // follow the ordinary honest pipeline on the relabeled data.
    if (setup_.attack == "lf") {
        for (auto& shard : setup_.byz_shards) shard = flip_labels(shard);
    }

    theta_ = init_params(setup_.model, derive_seed(setup_.seed, "init-model"));
    threads_ = setup_.threads > 0 ? setup_.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    if (threads_ < 1) threads_ = 1;

    workers_.reserve(n);
    const int d = setup_.model.param_count();
    auto add_worker = [&](const WorkerShard& shard, int index, bool byz) {
        if (shard.size() == 0) throw invalid_input("Trainer: empty worker shard");
        WorkerState w{.shard = &shard,
                      .class_weights = {},
                      .momentum = Vec(d, 0.0),
                      .batch_rng = make_stream(setup_.seed, "batch", index),
                      .byzantine = byz};
        if (setup_.objective) {
            w.class_weights = wola_class_weights(*setup_.objective, label_distribution(shard));
        }
        workers_.push_back(std::move(w));
    };
    for (int i = 0; i < h; ++i) {
        add_worker(setup_.honest_shards[i], i, false);
        honest_sizes_.push_back(static_cast<std::int64_t>(setup_.honest_shards[i].size()));
    }
    for (int i = 0; i < f; ++i) add_worker(setup_.byz_shards[i], h + i, true);
}

Vec Trainer::worker_step(WorkerState& w) {
    const auto& ds = w.shard->data;
    std::vector<std::int32_t> indices;
    if (setup_.opt.batch_size > 0) {
        indices.resize(setup_.opt.batch_size);
        for (auto& idx : indices) {
            idx = static_cast<std::int32_t>(w.batch_rng.bounded(ds.size()));
        }
    } else {
        indices = full_batch_indices(ds);
    }

    std::vector<double> weights(indices.size(), 1.0);
    if (setup_.objective) {
        for (std::size_t k = 0; k < indices.size(); ++k) {
            weights[k] = w.class_weights[ds.labels[indices[k]]];
        }
    }

    Vec g = weighted_batch_gradient(setup_.model, theta_, BatchRef{&ds, indices}, weights,
                                    setup_.opt.l2_reg);
    if (setup_.opt.clip > 0.0 && setup_.opt.clip_target == ClipTarget::gradient) {
        g = clip_to_norm(std::move(g), setup_.opt.clip);
    }

    const double beta = setup_.opt.beta;
    for (std::size_t k = 0; k < g.size(); ++k) {
        w.momentum[k] = beta * w.momentum[k] + (1.0 - beta) * g[k];
    }
    if (setup_.opt.clip > 0.0 && setup_.opt.clip_target == ClipTarget::momentum) {
        w.momentum = clip_to_norm(std::move(w.momentum), setup_.opt.clip);
    }
    return w.momentum;
}

void Trainer::honest_phase() {
    const int h = static_cast<int>(honest_sizes_.size());
    honest_momenta_.assign(h, Vec{});
    auto run_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) honest_momenta_[i] = worker_step(workers_[i]);
    };
    const int nthreads = std::min(threads_, h);
    if (nthreads <= 1) {
        run_range(0, h);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    const int chunk = (h + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(begin + chunk, h);
        if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
}

VectorBatch Trainer::byzantine_rows() {
    const int f = byzantine_count();
    if (f == 0) return {};
    const int n = worker_count();
    const int h = n - f;

    if (setup_.attack == "alie") {
        return attack_alie(honest_momenta_, n, f, setup_.alie_z_override);
    }
    if (setup_.attack == "foe") return attack_foe(honest_momenta_, f, setup_.foe_epsilon);
    if (setup_.attack == "sf") return attack_sf(honest_momenta_, f);
    if (setup_.attack == "mimic") return attack_mimic(honest_momenta_, f);

    // "lf" and "none": the Byzantine workers run the honest protocol on
    // their own (possibly relabeled) shards.
    VectorBatch rows;
    rows.reserve(f);
    for (int i = 0; i < f; ++i) rows.push_back(worker_step(workers_[h + i]));
    return rows;
}

RoundRecord Trainer::run_round() {
    const auto start = std::chrono::steady_clock::now();
    ++round_;

    honest_phase();
    VectorBatch byz = byzantine_rows();

    UpdateSet set;
    set.updates = honest_momenta_;
    for (auto& row : byz) set.updates.push_back(std::move(row));
    set.declared_f = setup_.declared_f;

    const UpdateSet mixed =
        preaggregate(setup_.preaggregator, set, setup_.declared_f, setup_.foundationfl_m,
                     derive_seed(setup_.seed, "bucketing", static_cast<std::uint64_t>(round_)));
    Vec direction;
    try {
        direction = aggregate(setup_.aggregator, mixed, setup_.gm);
    } catch (const convergence_failure& e) {
        throw convergence_failure("aggregation failed at round " + std::to_string(round_) +
                                      ": " + e.what(),
                                  e.last_iterate());
    }

    const double gamma = learning_rate(setup_.opt.schedule, round_);
    axpy_inplace(theta_, -gamma, direction);

    RoundRecord rec;
    rec.t = round_;
    rec.aggregate_norm = l2_norm(direction);
    rec.gradient_dissimilarity = gradient_dissimilarity(honest_momenta_, honest_sizes_);
    rec.test_accuracy = test_accuracy(setup_.model, theta_, setup_.test_set);

    double loss_acc = 0.0;
    for (std::size_t i = 0; i < honest_sizes_.size(); ++i) {
        const auto& w = workers_[i];
        const auto idx = full_batch_indices(w.shard->data);
        std::vector<double> weights(idx.size(), 1.0);
        if (setup_.objective) {
            for (std::size_t k = 0; k < idx.size(); ++k) {
                weights[k] = w.class_weights[w.shard->data.labels[idx[k]]];
            }
        }
        loss_acc += weighted_batch_loss(setup_.model, theta_, BatchRef{&w.shard->data, idx},
                                        weights, /*l2_reg=*/0.0);
    }
    rec.mean_honest_loss = loss_acc / static_cast<double>(honest_sizes_.size());

    rec.wall_clock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return rec;
}

std::vector<RoundRecord> Trainer::run() {
    std::vector<RoundRecord> records;
    records.reserve(setup_.opt.rounds);
    for (int t = 0; t < setup_.opt.rounds; ++t) records.push_back(run_round());
    return records;
}

}  // namespace wola
