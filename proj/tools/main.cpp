// wolafl: experiment runner for Byzantine-robust federated learning under
// label skew. Subcommands: run, sweep, bound-check, fig1.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wola/config.hpp"
#include "wola/experiment.hpp"

namespace {

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine-robust federated learning simulator"};
    app.require_subcommand(1);

    // --- run ---
    std::string run_config, run_out;
    std::int64_t run_seed = -1;
    auto* run = app.add_subcommand("run", "Run one experiment config over its seeds");
    run->add_option("--config", run_config, "Path to a JSON experiment config")->required();
    run->add_option("--seed", run_seed, "Run a single seed instead of the config's list");
    run->add_option("--out", run_out, "Output directory (overrides config output_dir)");

    // --- sweep ---
    std::string sweep_config, sweep_axis, sweep_values, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Grid over one config field");
    sweep->add_option("--config", sweep_config, "Path to a JSON experiment config")->required();
    sweep->add_option("--axis", sweep_axis, "Config field to vary (f, alpha, aggregator, ...)")
        ->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values for the axis")->required();
    sweep->add_option("--out", sweep_out, "Output directory (overrides config output_dir)");

    // --- bound-check ---
    int bc_n = 17, bc_f = 6, bc_trials = 1000, bc_classes = 10;
    std::uint64_t bc_seed = 1;
    auto* bc = app.add_subcommand(
        "bound-check", "Compare realized objective-attack deviation with the closed-form bound");
    bc->add_option("--n", bc_n, "Total workers");
    bc->add_option("--f", bc_f, "Byzantine workers");
    bc->add_option("--trials", bc_trials, "Random trials");
    bc->add_option("--seed", bc_seed, "Random seed");
    bc->add_option("--classes", bc_classes, "Number of classes");

    // --- fig1 ---
    std::string fig1_data, fig1_out = "fig1.csv";
    wola::Fig1Options fig1_opts;
    std::string fig1_model = "mlp", fig1_act = "tanh";
    auto* fig1 = app.add_subcommand(
        "fig1", "Track class-gradient cosine similarities while training on a CSV dataset");
    fig1->add_option("--data", fig1_data, "Input CSV (features..., label)")->required();
    fig1->add_option("--out", fig1_out, "Output CSV path");
    fig1->add_option("--steps", fig1_opts.steps, "Gradient-descent steps");
    fig1->add_option("--lr", fig1_opts.lr, "Learning rate");
    fig1->add_option("--model", fig1_model, "softmax_regression | mlp");
    fig1->add_option("--hidden", fig1_opts.hidden_dim, "Hidden units (mlp)");
    fig1->add_option("--activation", fig1_act, "relu | tanh");
    fig1->add_option("--seed", fig1_opts.seed, "Random seed");
    fig1->add_option("--test-fraction", fig1_opts.test_fraction, "Held-out fraction");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            wola::ExperimentConfig cfg = wola::load_config(run_config);
            if (run_seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(run_seed)};
            const std::string out_dir = run_out.empty() ? cfg.output_dir : run_out;
            return wola::cmd_run(cfg, out_dir);
        }
        if (sweep->parsed()) {
            wola::ExperimentConfig cfg = wola::load_config(sweep_config);
            const std::string out_dir = sweep_out.empty() ? cfg.output_dir : sweep_out;
            return wola::cmd_sweep(cfg, sweep_axis, split_values(sweep_values), out_dir);
        }
        if (bc->parsed()) {
            const auto report = wola::bound_check(bc_n, bc_f, bc_trials, bc_seed, bc_classes);
            std::printf("worst-attack |realized - bound| : %.3e (%s)\n", report.worst_attack_gap,
                        report.tight ? "tight" : "NOT TIGHT");
            std::printf("max random realized/bound      : %.6f (%s)\n", report.max_random_ratio,
                        report.all_below ? "all below bound" : "BOUND VIOLATED");
            return report.tight && report.all_below ? 0 : 1;
        }
        if (fig1->parsed()) {
            fig1_opts.kind = wola::model_kind_from_string(fig1_model);
            fig1_opts.activation = wola::activation_from_string(fig1_act);
            const auto result = wola::run_fig1(fig1_data, fig1_out, fig1_opts);
            std::printf("final test accuracy: %.4f\n", result.final_test_accuracy);
            for (std::size_t p = 0; p < result.pairs.size(); ++p) {
                std::printf("min cos(class %d, class %d) over steps: %+.4f\n",
                            result.pairs[p].first, result.pairs[p].second,
                            result.min_pairwise_cosine[p]);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
