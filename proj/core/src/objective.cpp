#include "wola/objective.hpp"

#include <algorithm>
#include <cmath>

#include "wola/error.hpp"

namespace wola {

ObjectiveMode objective_mode_from_string(const std::string& s) {
    if (s == "global") return ObjectiveMode::global;
    if (s == "uniform") return ObjectiveMode::uniform;
    if (s == "provided") return ObjectiveMode::provided;
    throw invalid_input("unknown objective mode: " + s);
}

std::string to_string(ObjectiveMode m) {
    switch (m) {
        case ObjectiveMode::global: return "global";
        case ObjectiveMode::uniform: return "uniform";
        case ObjectiveMode::provided: return "provided";
    }
    return "global";
}

std::vector<double> wola_class_weights(const TrainingObjective& q,
                                       const LabelDistribution& p_i) {
    if (q.q.size() != p_i.size()) throw invalid_input("objective/distribution class mismatch");
    std::vector<double> w(q.q.size(), 0.0);
    for (std::size_t c = 0; c < w.size(); ++c) {
        if (p_i[c] > 0.0) w[c] = q.q[c] / p_i[c];
    }
    return w;
}

std::vector<double> wola_weights(const TrainingObjective& q, const LabelDistribution& p_i,
                                 std::span<const int> labels) {
    const auto table = wola_class_weights(q, p_i);
    std::vector<double> weights(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const int y = labels[k];
        if (y < 0 || static_cast<std::size_t>(y) >= p_i.size()) {
            throw invalid_input("wola_weights: label out of range");
        }
        if (!(p_i[y] > 0.0)) {
            throw invalid_input("wola_weights: label " + std::to_string(y) +
                                " has zero local probability (not drawn from this shard)");
        }
        weights[k] = table[y];
    }
    return weights;
}

TrainingObjective build_objective(ObjectiveMode mode,
                                  const std::vector<LabelDistribution>& honest_dists,
                                  const std::vector<std::int64_t>& sizes,
                                  const std::optional<LabelDistribution>& provided,
                                  int num_classes) {
    switch (mode) {
        case ObjectiveMode::uniform: {
            if (num_classes < 1) throw invalid_input("build_objective: num_classes must be >= 1");
            return {LabelDistribution(num_classes, 1.0 / num_classes)};
        }
        case ObjectiveMode::provided: {
            if (!provided) throw invalid_input("build_objective: provided mode needs a vector");
            check_simplex(*provided, 1e-9);
            return {*provided};
        }
        case ObjectiveMode::global: {
            if (honest_dists.empty()) {
                throw invalid_input("build_objective: global mode needs honest distributions");
            }
            if (sizes.size() != honest_dists.size()) {
                throw invalid_input("build_objective: sizes length mismatch");
            }
            LabelDistribution q(honest_dists.front().size(), 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < honest_dists.size(); ++i) {
                if (sizes[i] <= 0) throw invalid_input("build_objective: nonpositive shard size");
                total += static_cast<double>(sizes[i]);
            }
            for (std::size_t i = 0; i < honest_dists.size(); ++i) {
                if (honest_dists[i].size() != q.size()) {
                    throw invalid_input("build_objective: class count mismatch");
                }
                const double w = static_cast<double>(sizes[i]) / total;
                for (std::size_t c = 0; c < q.size(); ++c) q[c] += w * honest_dists[i][c];
            }
            return {q};
        }
    }
    throw invalid_input("build_objective: bad mode");
}

std::vector<LabelDistribution> objective_attack_worst(
    const std::vector<LabelDistribution>& honest_dists, int f, int n) {
    if (f < 0 || n < 1 || f >= n) throw invalid_input("objective_attack_worst: need 0 <= f < n");
    if (static_cast<int>(honest_dists.size()) != n - f) {
        throw invalid_input("objective_attack_worst: expected n-f honest distributions");
    }
    const std::size_t c_count = honest_dists.front().size();
    // Unweighted honest mean; the mean-aggregated objective weighs each
    // submission equally, so equality with the deviation bound needs the
    // same convention here.
    LabelDistribution u(c_count, 0.0);
    for (const auto& d : honest_dists) {
        if (d.size() != c_count) throw invalid_input("objective_attack_worst: class mismatch");
        for (std::size_t c = 0; c < c_count; ++c) u[c] += d[c];
    }
    for (auto& x : u) x /= static_cast<double>(n - f);

    std::size_t target = 0;
    for (std::size_t c = 1; c < c_count; ++c) {
        if (u[c] < u[target]) target = c;
    }

    std::vector<LabelDistribution> submissions = honest_dists;
    LabelDistribution one_hot(c_count, 0.0);
    one_hot[target] = 1.0;
    for (int k = 0; k < f; ++k) submissions.push_back(one_hot);
    return submissions;
}

double objective_deviation_bound(const LabelDistribution& u, int f, int n) {
    if (f < 0 || n < 1 || f >= n) throw invalid_input("objective_deviation_bound: need 0 <= f < n");
    if (u.empty()) throw invalid_input("objective_deviation_bound: empty distribution");
    const double u_min = *std::min_element(u.begin(), u.end());
    return static_cast<double>(f) / static_cast<double>(n) * (2.0 - 2.0 * u_min);
}

TrainingObjective aggregate_objective_gm(const std::vector<LabelDistribution>& submissions,
                                         const WeiszfeldOptions& opts) {
    if (submissions.empty()) throw invalid_input("aggregate_objective_gm: no submissions");
    for (const auto& s : submissions) check_simplex(s, 1e-6);
    TrainingObjective out{weiszfeld_geometric_median(submissions, opts)};
    check_simplex(out.q, 1e-6);
    return out;
}

ParamVector class_gradient(const ModelSpec& spec, const ParamVector& theta,
                           const LabeledDataset& ds, int c) {
    if (c < 0 || c >= ds.num_classes) throw invalid_input("class_gradient: class out of range");
    std::vector<std::int32_t> idx;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        if (ds.labels[k] == c) idx.push_back(static_cast<std::int32_t>(k));
    }
    if (idx.empty()) throw invalid_input("class_gradient: class has no instances");
    const std::vector<double> ones(idx.size(), 1.0);
    return weighted_batch_gradient(spec, theta, BatchRef{&ds, idx}, ones, /*l2_reg=*/0.0);
}

double cosine_similarity(const Vec& a, const Vec& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw invalid_input("cosine_similarity: zero vector");
    return dot(a, b) / (na * nb);
}

double l1_distance(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw invalid_input("l1_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s;
}

}  // namespace wola
