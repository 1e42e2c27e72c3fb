#include "wola/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wola/aggregators.hpp"
#include "wola/attacks.hpp"
#include "wola/error.hpp"
#include "wola/preaggregators.hpp"

namespace wola {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw invalid_input("config field '" + field + "': " + msg);
}

void reject_unknown_keys(const json& obj, const std::string& scope,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) fail(scope.empty() ? key : scope + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& scope) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(scope.empty() ? key : scope + "." + key, e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (dataset.type != "synthetic" && dataset.type != "csv") {
        fail("dataset.type", "must be 'synthetic' or 'csv'");
    }
    if (dataset.type == "synthetic") {
        if (dataset.synthetic.num_classes < 2) fail("dataset.num_classes", "must be >= 2");
        if (dataset.synthetic.feature_dim < 1) fail("dataset.feature_dim", "must be >= 1");
        if (dataset.synthetic.samples_per_class < 1) {
            fail("dataset.samples_per_class", "must be >= 1");
        }
        if (!(dataset.synthetic.class_separation > 0.0)) {
            fail("dataset.class_separation", "must be positive");
        }
        if (dataset.test_samples < 1) fail("dataset.test_samples", "must be >= 1");
    } else {
        if (dataset.path.empty()) fail("dataset.path", "required for csv datasets");
        if (!(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0)) {
            fail("dataset.test_fraction", "must be in (0, 1)");
        }
    }
    if (n < 1) fail("n", "must be >= 1");
    if (f < 0) fail("f", "must be >= 0");
    if (2 * f >= n) fail("f", "threat model requires f < n/2");
    if (declared_f >= 0 && 2 * declared_f >= n) fail("declared_f", "must stay below n/2");
    if (!(alpha > 0.0)) fail("alpha", "must be positive");
    model.validate();
    if (objective_mode == ObjectiveMode::provided) {
        if (loss_mode != LossMode::standard && !objective_provided) {
            fail("objective.provided", "required when objective.mode is 'provided'");
        }
        if (objective_provided) check_simplex(*objective_provided, 1e-9);
    }
    if (!is_known_aggregator(aggregator)) fail("aggregator", "unknown rule '" + aggregator + "'");
    if (!is_known_preaggregator(preaggregator)) {
        fail("preaggregator", "unknown transform '" + preaggregator + "'");
    }
    if (!is_known_attack(attack.name)) fail("attack.name", "unknown attack '" + attack.name + "'");
    if (attack.name != "none" && f == 0) fail("attack.name", "an attack needs f >= 1");
    if (!(optimizer.beta >= 0.0 && optimizer.beta < 1.0)) fail("optimizer.beta", "need 0 <= beta < 1");
    if (optimizer.rounds < 1) fail("optimizer.rounds", "must be >= 1");
    if (!(optimizer.l2_reg >= 0.0)) fail("optimizer.l2_reg", "must be >= 0");
    learning_rate(optimizer.schedule, 1);  // validates schedule parameters
    if (seeds.empty()) fail("seeds", "at least one seed is required");
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw invalid_input(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw invalid_input("config root must be a JSON object");

    reject_unknown_keys(root, "",
                        {"dataset", "n", "f", "alpha", "equal_size_shards", "model", "loss_mode",
                         "objective", "aggregator", "preaggregator", "foundationfl_m", "attack",
                         "optimizer", "seeds", "output_dir", "declared_f", "threads"});

    ExperimentConfig cfg;

    if (root.contains("dataset")) {
        const auto& d = root.at("dataset");
        reject_unknown_keys(d, "dataset",
                            {"type", "num_classes", "feature_dim", "samples_per_class",
                             "class_separation", "test_samples", "path", "label_column",
                             "test_fraction"});
        cfg.dataset.type = get_or<std::string>(d, "type", "synthetic", "dataset");
        cfg.dataset.synthetic.num_classes =
            get_or<int>(d, "num_classes", cfg.dataset.synthetic.num_classes, "dataset");
        cfg.dataset.synthetic.feature_dim =
            get_or<int>(d, "feature_dim", cfg.dataset.synthetic.feature_dim, "dataset");
        cfg.dataset.synthetic.samples_per_class =
            get_or<int>(d, "samples_per_class", cfg.dataset.synthetic.samples_per_class, "dataset");
        cfg.dataset.synthetic.class_separation = get_or<double>(
            d, "class_separation", cfg.dataset.synthetic.class_separation, "dataset");
        cfg.dataset.test_samples = get_or<int>(d, "test_samples", cfg.dataset.test_samples, "dataset");
        cfg.dataset.path = get_or<std::string>(d, "path", "", "dataset");
        cfg.dataset.label_column = get_or<int>(d, "label_column", -1, "dataset");
        cfg.dataset.test_fraction =
            get_or<double>(d, "test_fraction", cfg.dataset.test_fraction, "dataset");
    }

    cfg.n = get_or<int>(root, "n", cfg.n, "");
    cfg.f = get_or<int>(root, "f", cfg.f, "");
    cfg.alpha = get_or<double>(root, "alpha", cfg.alpha, "");
    cfg.equal_size_shards = get_or<bool>(root, "equal_size_shards", cfg.equal_size_shards, "");

    if (root.contains("model")) {
        const auto& m = root.at("model");
        reject_unknown_keys(m, "model", {"kind", "hidden_dim", "activation"});
        cfg.model.kind =
            model_kind_from_string(get_or<std::string>(m, "kind", "softmax_regression", "model"));
        cfg.model.hidden_dim = get_or<int>(m, "hidden_dim", cfg.model.hidden_dim, "model");
        cfg.model.activation =
            activation_from_string(get_or<std::string>(m, "activation", "relu", "model"));
    }

    cfg.loss_mode =
        loss_mode_from_string(get_or<std::string>(root, "loss_mode", "standard", ""));

    if (root.contains("objective")) {
        const auto& o = root.at("objective");
        reject_unknown_keys(o, "objective", {"mode", "provided"});
        cfg.objective_mode =
            objective_mode_from_string(get_or<std::string>(o, "mode", "global", "objective"));
        if (o.contains("provided") && !o.at("provided").is_null()) {
            cfg.objective_provided = o.at("provided").get<std::vector<double>>();
        }
    }

    cfg.aggregator = get_or<std::string>(root, "aggregator", cfg.aggregator, "");
    cfg.preaggregator = get_or<std::string>(root, "preaggregator", cfg.preaggregator, "");
    cfg.foundationfl_m = get_or<int>(root, "foundationfl_m", cfg.foundationfl_m, "");

    if (root.contains("attack")) {
        const auto& a = root.at("attack");
        reject_unknown_keys(a, "attack", {"name", "foe_epsilon", "alie_z"});
        cfg.attack.name = get_or<std::string>(a, "name", "none", "attack");
        cfg.attack.foe_epsilon = get_or<double>(a, "foe_epsilon", cfg.attack.foe_epsilon, "attack");
        if (a.contains("alie_z") && !a.at("alie_z").is_null()) {
            cfg.attack.alie_z = a.at("alie_z").get<double>();
        }
    }

    if (root.contains("optimizer")) {
        const auto& o = root.at("optimizer");
        reject_unknown_keys(o, "optimizer",
                            {"beta", "schedule", "clip", "l2_reg", "batch_size", "rounds",
                             "clip_target"});
        cfg.optimizer.beta = get_or<double>(o, "beta", cfg.optimizer.beta, "optimizer");
        cfg.optimizer.clip = get_or<double>(o, "clip", cfg.optimizer.clip, "optimizer");
        cfg.optimizer.l2_reg = get_or<double>(o, "l2_reg", cfg.optimizer.l2_reg, "optimizer");
        cfg.optimizer.batch_size =
            get_or<int>(o, "batch_size", cfg.optimizer.batch_size, "optimizer");
        cfg.optimizer.rounds = get_or<int>(o, "rounds", cfg.optimizer.rounds, "optimizer");
        const std::string clip_target =
            get_or<std::string>(o, "clip_target", "gradient", "optimizer");
        if (clip_target == "gradient") {
            cfg.optimizer.clip_target = ClipTarget::gradient;
        } else if (clip_target == "momentum") {
            cfg.optimizer.clip_target = ClipTarget::momentum;
        } else {
            fail("optimizer.clip_target", "must be 'gradient' or 'momentum'");
        }
        if (o.contains("schedule")) {
            const auto& s = o.at("schedule");
            reject_unknown_keys(s, "optimizer.schedule",
                                {"kind", "base", "period", "hi", "lo", "switch_step"});
            auto& sch = cfg.optimizer.schedule;
            sch.kind = schedule_kind_from_string(
                get_or<std::string>(s, "kind", "constant", "optimizer.schedule"));
            sch.base = get_or<double>(s, "base", sch.base, "optimizer.schedule");
            sch.period = get_or<int>(s, "period", sch.period, "optimizer.schedule");
            sch.hi = get_or<double>(s, "hi", sch.hi, "optimizer.schedule");
            sch.lo = get_or<double>(s, "lo", sch.lo, "optimizer.schedule");
            sch.switch_step = get_or<int>(s, "switch_step", sch.switch_step, "optimizer.schedule");
        }
    }

    cfg.seeds = get_or<std::vector<std::uint64_t>>(root, "seeds", cfg.seeds, "");
    cfg.output_dir = get_or<std::string>(root, "output_dir", cfg.output_dir, "");
    cfg.declared_f = get_or<int>(root, "declared_f", cfg.declared_f, "");
    cfg.threads = get_or<int>(root, "threads", cfg.threads, "");

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json root;
    json d;
    d["type"] = cfg.dataset.type;
    if (cfg.dataset.type == "synthetic") {
        d["num_classes"] = cfg.dataset.synthetic.num_classes;
        d["feature_dim"] = cfg.dataset.synthetic.feature_dim;
        d["samples_per_class"] = cfg.dataset.synthetic.samples_per_class;
        d["class_separation"] = cfg.dataset.synthetic.class_separation;
        d["test_samples"] = cfg.dataset.test_samples;
    } else {
        d["path"] = cfg.dataset.path;
        d["label_column"] = cfg.dataset.label_column;
        d["test_fraction"] = cfg.dataset.test_fraction;
    }
    root["dataset"] = d;
    root["n"] = cfg.n;
    root["f"] = cfg.f;
    root["alpha"] = cfg.alpha;
    root["equal_size_shards"] = cfg.equal_size_shards;

    json m;
    m["kind"] = to_string(cfg.model.kind);
    if (cfg.model.kind == ModelKind::mlp) {
        m["hidden_dim"] = cfg.model.hidden_dim;
        m["activation"] = to_string(cfg.model.activation);
    }
    root["model"] = m;

    root["loss_mode"] = to_string(cfg.loss_mode);
    json o;
    o["mode"] = to_string(cfg.objective_mode);
    if (cfg.objective_provided) o["provided"] = *cfg.objective_provided;
    root["objective"] = o;

    root["aggregator"] = cfg.aggregator;
    root["preaggregator"] = cfg.preaggregator;
    if (cfg.foundationfl_m > 0) root["foundationfl_m"] = cfg.foundationfl_m;

    json a;
    a["name"] = cfg.attack.name;
    a["foe_epsilon"] = cfg.attack.foe_epsilon;
    if (cfg.attack.alie_z) a["alie_z"] = *cfg.attack.alie_z;
    root["attack"] = a;

    json opt;
    opt["beta"] = cfg.optimizer.beta;
    opt["clip"] = cfg.optimizer.clip;
    opt["l2_reg"] = cfg.optimizer.l2_reg;
    opt["batch_size"] = cfg.optimizer.batch_size;
    opt["rounds"] = cfg.optimizer.rounds;
    opt["clip_target"] =
        cfg.optimizer.clip_target == ClipTarget::gradient ? "gradient" : "momentum";
    json sch;
    sch["kind"] = to_string(cfg.optimizer.schedule.kind);
    switch (cfg.optimizer.schedule.kind) {
        case ScheduleSpec::Kind::inverse_step:
            sch["base"] = cfg.optimizer.schedule.base;
            sch["period"] = cfg.optimizer.schedule.period;
            break;
        case ScheduleSpec::Kind::two_phase:
            sch["hi"] = cfg.optimizer.schedule.hi;
            sch["lo"] = cfg.optimizer.schedule.lo;
            sch["switch_step"] = cfg.optimizer.schedule.switch_step;
            break;
        case ScheduleSpec::Kind::constant:
            sch["base"] = cfg.optimizer.schedule.base;
            break;
    }
    opt["schedule"] = sch;
    root["optimizer"] = opt;

    root["seeds"] = cfg.seeds;
    root["output_dir"] = cfg.output_dir;
    if (cfg.declared_f >= 0) root["declared_f"] = cfg.declared_f;
    root["threads"] = cfg.threads;

    return root.dump(2) + "\n";
}

}  // namespace wola
