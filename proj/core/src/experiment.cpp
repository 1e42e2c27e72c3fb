#include "wola/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wola/error.hpp"
#include "wola/partition.hpp"
#include "wola/rng.hpp"

namespace wola {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // population
};

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

struct SeedData {
    std::vector<WorkerShard> honest;
    std::vector<WorkerShard> byz;
    LabeledDataset test_set;
};

SeedData build_seed_data(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedData out;
    LabeledDataset train;
    if (cfg.dataset.type == "synthetic") {
        train = generate_synthetic(cfg.dataset.synthetic, derive_seed(seed, "dataset"));
    } else {
        const auto full = load_csv_dataset(cfg.dataset.path, cfg.dataset.label_column);
        auto [tr, te] =
            stratified_split(full, cfg.dataset.test_fraction, derive_seed(seed, "split"));
        train = std::move(tr);
        out.test_set = std::move(te);
    }

    auto shards = dirichlet_partition(train, cfg.n, cfg.alpha, derive_seed(seed, "partition"),
                                      PartitionOptions{.equal_size = cfg.equal_size_shards});
    // Fixed worker order: honest first, Byzantine last.
    out.honest.assign(shards.begin(), shards.begin() + (cfg.n - cfg.f));
    out.byz.assign(shards.begin() + (cfg.n - cfg.f), shards.end());

    if (cfg.dataset.type == "synthetic") {
        // Test set matching the label distribution of the honest global
        // dataset (Byzantine shards are excluded from it).
        const auto p = global_distribution(out.honest);
        const auto counts = proportional_counts(p, cfg.dataset.test_samples);
        out.test_set = sample_synthetic_by_counts(cfg.dataset.synthetic, counts,
                                                  derive_seed(seed, "testset"));
    }
    return out;
}

int train_classes(const SeedData& data) { return data.honest.front().data.num_classes; }

std::optional<TrainingObjective> build_run_objective(const ExperimentConfig& cfg,
                                                     const SeedData& data) {
    if (cfg.loss_mode == LossMode::standard) return std::nullopt;

    std::vector<LabelDistribution> honest_dists;
    std::vector<std::int64_t> sizes;
    for (const auto& s : data.honest) {
        honest_dists.push_back(label_distribution(s));
        sizes.push_back(static_cast<std::int64_t>(s.size()));
    }

    if (cfg.loss_mode == LossMode::wola_dagger) {
        // Attacked objective: Byzantine one-hot submissions aggregated by
        // the geometric-median defense, broadcast once before training.
        const auto submissions = objective_attack_worst(honest_dists, cfg.f, cfg.n);
        return aggregate_objective_gm(submissions);
    }
    return build_objective(cfg.objective_mode, honest_dists, sizes, cfg.objective_provided,
                           train_classes(data));
}

}  // namespace

Trainer build_trainer(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SeedData data = build_seed_data(cfg, seed);
    TrainerSetup setup;
    setup.model = cfg.model;
    setup.model.feature_dim = static_cast<int>(data.honest.front().data.feature_dim());
    setup.model.num_classes = train_classes(data);
    setup.objective = build_run_objective(cfg, data);
    setup.honest_shards = std::move(data.honest);
    setup.byz_shards = std::move(data.byz);
    setup.test_set = std::move(data.test_set);
    setup.aggregator = cfg.aggregator;
    setup.preaggregator = cfg.preaggregator;
    setup.foundationfl_m = cfg.foundationfl_m;
    setup.attack = cfg.attack.name;
    setup.foe_epsilon = cfg.attack.foe_epsilon;
    setup.alie_z_override = cfg.attack.alie_z;
    setup.opt = cfg.optimizer;
    setup.seed = seed;
    setup.declared_f = cfg.declared_f;
    setup.threads = cfg.threads;
    return Trainer(std::move(setup));
}

SeedRunResult run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    Trainer trainer = build_trainer(cfg, seed);
    SeedRunResult result;
    result.seed = seed;
    result.records = trainer.run();

    std::vector<double> accs, dissims;
    for (const auto& r : result.records) {
        accs.push_back(r.test_accuracy);
        dissims.push_back(r.gradient_dissimilarity);
    }
    result.avg_accuracy = mean_sd(accs).mean;
    result.avg_dissimilarity = mean_sd(dissims).mean;
    result.final_accuracy = result.records.empty() ? 0.0 : result.records.back().test_accuracy;
    return result;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentSummary summary;
    std::vector<double> accs, dissims;
    for (std::uint64_t seed : cfg.seeds) {
        summary.per_seed.push_back(run_single_seed(cfg, seed));
        accs.push_back(summary.per_seed.back().avg_accuracy);
        dissims.push_back(summary.per_seed.back().avg_dissimilarity);
    }
    const auto acc = mean_sd(accs);
    const auto dis = mean_sd(dissims);
    summary.accuracy_mean = acc.mean;
    summary.accuracy_sd = acc.sd;
    summary.dissimilarity_mean = dis.mean;
    summary.dissimilarity_sd = dis.sd;
    return summary;
}

void write_round_csv(std::ostream& out, const std::vector<RoundRecord>& records) {
    out << "t,test_accuracy,gradient_dissimilarity,mean_honest_loss,aggregate_norm\n";
    for (const auto& r : records) {
        out << r.t << ',' << format_double(r.test_accuracy) << ','
            << format_double(r.gradient_dissimilarity) << ','
            << format_double(r.mean_honest_loss) << ',' << format_double(r.aggregate_norm)
            << '\n';
    }
}

namespace {

nlohmann::json summary_to_json(const ExperimentConfig& cfg, const ExperimentSummary& summary) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(config_to_json(cfg));
    j["accuracy_mean"] = summary.accuracy_mean;
    j["accuracy_sd"] = summary.accuracy_sd;
    j["dissimilarity_mean"] = summary.dissimilarity_mean;
    j["dissimilarity_sd"] = summary.dissimilarity_sd;
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : summary.per_seed) {
        nlohmann::json row;
        row["seed"] = s.seed;
        row["avg_accuracy"] = s.avg_accuracy;
        row["avg_dissimilarity"] = s.avg_dissimilarity;
        row["final_accuracy"] = s.final_accuracy;
        seeds.push_back(row);
    }
    j["seeds"] = seeds;
    return j;
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    ExperimentSummary summary;
    std::vector<double> accs, dissims;
    for (std::uint64_t seed : cfg.seeds) {
        try {
            auto result = run_single_seed(cfg, seed);
            std::ofstream csv(fs::path(out_dir) / ("rounds_seed" + std::to_string(seed) + ".csv"),
                              std::ios::binary);
            write_round_csv(csv, result.records);
            accs.push_back(result.avg_accuracy);
            dissims.push_back(result.avg_dissimilarity);
            std::cout << "seed " << seed << ": avg accuracy "
                      << format_double(result.avg_accuracy) << ", avg dissimilarity "
                      << format_double(result.avg_dissimilarity) << "\n";
            summary.per_seed.push_back(std::move(result));
        } catch (const std::exception& e) {
            std::cerr << "seed " << seed << " aborted: " << e.what() << "\n";
            return 1;
        }
    }
    const auto acc = mean_sd(accs);
    const auto dis = mean_sd(dissims);
    summary.accuracy_mean = acc.mean;
    summary.accuracy_sd = acc.sd;
    summary.dissimilarity_mean = dis.mean;
    summary.dissimilarity_sd = dis.sd;

    std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
    js << summary_to_json(cfg, summary).dump(2) << "\n";
    return 0;
}

namespace {

void apply_axis(ExperimentConfig& cfg, const std::string& axis, const std::string& value) {
    auto as_int = [&] {
        int v = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
            throw invalid_input("sweep value '" + value + "' is not an integer");
        }
        return v;
    };
    auto as_double = [&] {
        double v = 0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
            throw invalid_input("sweep value '" + value + "' is not a number");
        }
        return v;
    };

    if (axis == "f") {
        cfg.f = as_int();
    } else if (axis == "n") {
        cfg.n = as_int();
    } else if (axis == "alpha") {
        cfg.alpha = as_double();
    } else if (axis == "aggregator") {
        cfg.aggregator = value;
    } else if (axis == "preaggregator") {
        cfg.preaggregator = value;
    } else if (axis == "attack") {
        cfg.attack.name = value;
    } else if (axis == "loss_mode") {
        cfg.loss_mode = loss_mode_from_string(value);
    } else if (axis == "beta") {
        cfg.optimizer.beta = as_double();
    } else if (axis == "batch_size") {
        cfg.optimizer.batch_size = as_int();
    } else if (axis == "clip") {
        cfg.optimizer.clip = as_double();
    } else if (axis == "l2_reg") {
        cfg.optimizer.l2_reg = as_double();
    } else if (axis == "rounds") {
        cfg.optimizer.rounds = as_int();
    } else {
        throw invalid_input("unknown sweep axis '" + axis + "'");
    }
}

}  // namespace

int cmd_sweep(const ExperimentConfig& base, const std::string& axis,
              const std::vector<std::string>& values, const std::string& out_dir) {
    if (values.empty()) throw invalid_input("sweep: at least one value is required");
    fs::create_directories(out_dir);

    std::ostringstream table;
    table << "axis,value,accuracy_mean,accuracy_sd,dissimilarity_mean,dissimilarity_sd\n";
    int status = 0;
    for (const auto& value : values) {
        ExperimentConfig cfg = base;
        apply_axis(cfg, axis, value);
        cfg.validate();
        const std::string cell_dir = (fs::path(out_dir) / (axis + "=" + value)).string();
        std::cout << "[sweep] " << axis << " = " << value << "\n";
        const int rc = cmd_run(cfg, cell_dir);
        if (rc != 0) {
            status = rc;
            continue;
        }
        std::ifstream js(fs::path(cell_dir) / "summary.json");
        const auto summary = nlohmann::json::parse(js);
        table << csv_quote(axis) << ',' << csv_quote(value) << ','
              << format_double(summary.at("accuracy_mean").get<double>()) << ','
              << format_double(summary.at("accuracy_sd").get<double>()) << ','
              << format_double(summary.at("dissimilarity_mean").get<double>()) << ','
              << format_double(summary.at("dissimilarity_sd").get<double>()) << '\n';
    }
    std::ofstream csv(fs::path(out_dir) / "sweep_summary.csv", std::ios::binary);
    csv << table.str();
    return status;
}

BoundCheckReport bound_check(int n, int f, int trials, std::uint64_t seed, int num_classes) {
    if (f < 0 || n < 1 || f >= n) throw invalid_input("bound_check: need 0 <= f < n");
    if (num_classes < 2) throw invalid_input("bound_check: need at least two classes");
    BoundCheckReport report;
    report.tight = true;
    report.all_below = true;
    Rng rng = make_stream(seed, "bound-check");

    for (int trial = 0; trial < trials; ++trial) {
        std::vector<LabelDistribution> honest;
        for (int i = 0; i < n - f; ++i) {
            honest.push_back(rng.dirichlet_symmetric(1.0, num_classes));
        }
        LabelDistribution u(num_classes, 0.0);
        for (const auto& d : honest) {
            for (int c = 0; c < num_classes; ++c) u[c] += d[c];
        }
        for (auto& x : u) x /= static_cast<double>(n - f);
        const double bound = objective_deviation_bound(u, f, n);

        // Worst-case construction: must achieve the bound exactly.
        {
            const auto submissions = objective_attack_worst(honest, f, n);
            const auto mean_q = coordinate_mean(submissions);
            const double realized = l1_distance(mean_q, u);
            report.worst_attack_gap = std::max(report.worst_attack_gap,
                                               std::abs(realized - bound));
            if (std::abs(realized - bound) > 1e-12) report.tight = false;
        }

        // Random adversaries: must stay below the bound.
        if (f > 0) {
            auto submissions = honest;
            for (int k = 0; k < f; ++k) {
                submissions.push_back(rng.dirichlet_symmetric(1.0, num_classes));
            }
            const double realized = l1_distance(coordinate_mean(submissions), u);
            if (bound > 0.0) {
                report.max_random_ratio = std::max(report.max_random_ratio, realized / bound);
            }
            if (realized > bound + 1e-12) report.all_below = false;
        }
    }
    return report;
}

Fig1Result run_fig1(const std::string& csv_path, const std::string& out_path,
                    const Fig1Options& opts) {
    const auto full = load_csv_dataset(csv_path);
    auto [train, test] = stratified_split(full, opts.test_fraction, derive_seed(opts.seed, "split"));
    if (train.size() == 0 || test.size() == 0) {
        throw invalid_input("fig1: train/test split left an empty side");
    }

    ModelSpec spec;
    spec.kind = opts.kind;
    spec.feature_dim = static_cast<int>(train.feature_dim());
    spec.num_classes = train.num_classes;
    spec.hidden_dim = opts.hidden_dim;
    spec.activation = opts.activation;

    ParamVector theta = init_params(spec, derive_seed(opts.seed, "init-model"));
    const auto idx = full_batch_indices(train);
    const std::vector<double> ones(idx.size(), 1.0);

    Fig1Result result;
    for (int a = 0; a < train.num_classes; ++a) {
        for (int b = a + 1; b < train.num_classes; ++b) result.pairs.emplace_back(a, b);
    }
    result.min_pairwise_cosine.assign(result.pairs.size(), 1.0);

    auto class_label = [&](int c) {
        return c < static_cast<int>(train.class_names.size()) ? train.class_names[c]
                                                              : std::to_string(c);
    };

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw invalid_input("fig1: cannot open output file " + out_path);
    out << "step,train_loss,test_accuracy";
    for (const auto& [a, b] : result.pairs) {
        out << ",cos_" << class_label(a) << '_' << class_label(b);
    }
    out << '\n';

    for (int step = 1; step <= opts.steps; ++step) {
        std::vector<ParamVector> class_grads;
        class_grads.reserve(train.num_classes);
        for (int c = 0; c < train.num_classes; ++c) {
            class_grads.push_back(class_gradient(spec, theta, train, c));
        }
        const double loss = weighted_batch_loss(spec, theta, BatchRef{&train, idx}, ones,
                                                opts.l2_reg);
        const double acc = test_accuracy(spec, theta, test);
        result.final_test_accuracy = acc;

        out << step << ',' << format_double(loss) << ',' << format_double(acc);
        for (std::size_t p = 0; p < result.pairs.size(); ++p) {
            const auto& [a, b] = result.pairs[p];
            const double cs = cosine_similarity(class_grads[a], class_grads[b]);
            result.min_pairwise_cosine[p] = std::min(result.min_pairwise_cosine[p], cs);
            out << ',' << format_double(cs);
        }
        out << '\n';

        // Plain full-batch gradient descent.
        const auto grad =
            weighted_batch_gradient(spec, theta, BatchRef{&train, idx}, ones, opts.l2_reg);
        axpy_inplace(theta, -opts.lr, grad);
    }
    return result;
}

}  // namespace wola
