#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wola/dataset.hpp"
#include "wola/model.hpp"
#include "wola/objective.hpp"
#include "wola/trainer.hpp"

namespace wola {

/// Full description of one experiment. Mirrors the JSON config schema
/// documented in the README; parse_config/to_json round-trip it.
struct ExperimentConfig {
    struct Dataset {
        std::string type = "synthetic";  // "synthetic" | "csv"
        // synthetic
        SyntheticSpec synthetic;
        int test_samples = 1000;
        // csv
        std::string path;
        int label_column = -1;
        double test_fraction = 0.2;
    };

    struct Attack {
        std::string name = "none";
        double foe_epsilon = 1.1;
        std::optional<double> alie_z;
    };

    Dataset dataset;
    int n = 17;
    int f = 0;
    double alpha = 1.0;
    bool equal_size_shards = true;
    ModelSpec model;
    LossMode loss_mode = LossMode::standard;
    ObjectiveMode objective_mode = ObjectiveMode::global;
    std::optional<LabelDistribution> objective_provided;
    std::string aggregator = "mean";
    std::string preaggregator = "none";
    int foundationfl_m = 0;  // <= 0: n/2 default
    Attack attack;
    OptimizerOptions optimizer;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string output_dir = "out";
    int declared_f = -1;  // -1: mirror f
    int threads = 1;      // <= 0: hardware concurrency

    /// Throws invalid_input with a field-level message on any violation
    /// (threat model f < n/2, unknown names, nonpositive sizes, ...).
    void validate() const;
};

/// Parses the JSON text of a config file. Unknown keys are rejected so
/// typos fail loudly. The result is validated.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form (defaults filled in, keys sorted). parse and
/// serialise are mutually inverse on this form.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace wola
