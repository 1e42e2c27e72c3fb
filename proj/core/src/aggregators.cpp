#include "wola/aggregators.hpp"

#include <algorithm>
#include <numeric>

#include "wola/error.hpp"

namespace wola {

void UpdateSet::validate() const {
    batch_dim(updates);
    const int n = count();
    if (declared_f < 0 || 2 * declared_f >= n) {
        throw invalid_input("UpdateSet: need 0 <= declared_f < n/2");
    }
}

Vec agg_mean(const UpdateSet& u) { return coordinate_mean(u.updates); }

Vec agg_cwmed(const UpdateSet& u) { return coordinate_median(u.updates); }

Vec agg_cwtm(const UpdateSet& u) {
    const std::size_t d = batch_dim(u.updates);
    const int n = u.count();
    const int f = u.declared_f;
    if (n <= 2 * f) throw invalid_input("cwtm: need n > 2*declared_f");
    Vec out(d);
    std::vector<double> column(n);
    for (std::size_t k = 0; k < d; ++k) {
        for (int i = 0; i < n; ++i) column[i] = u.updates[i][k];
        std::sort(column.begin(), column.end());
        double acc = 0.0;
        for (int i = f; i < n - f; ++i) acc += column[i];
        out[k] = acc / static_cast<double>(n - 2 * f);
    }
    return out;
}

Vec agg_gm(const UpdateSet& u, const WeiszfeldOptions& opts) {
    return weiszfeld_geometric_median(u.updates, opts);
}

std::vector<double> krum_scores(const UpdateSet& u) {
    const int n = u.count();
    const int f = u.declared_f;
    if (n < f + 3) throw invalid_input("krum: need n >= declared_f + 3");
    const auto dist2 = pairwise_sq_distances(u.updates);
    const int neighbors = n - f - 2;
    std::vector<double> scores(n);
    std::vector<double> others(n - 1);
    for (int i = 0; i < n; ++i) {
        int m = 0;
        for (int j = 0; j < n; ++j) {
            if (j != i) others[m++] = dist2[i][j];
        }
        std::sort(others.begin(), others.end());
        scores[i] = std::accumulate(others.begin(), others.begin() + neighbors, 0.0);
    }
    return scores;
}

namespace {

// Indices of the m smallest scores, ties resolved toward the lower index.
std::vector<int> smallest_score_rows(const std::vector<double>& scores, int m) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });
    order.resize(m);
    return order;
}

}  // namespace

Vec agg_krum(const UpdateSet& u) {
    const auto scores = krum_scores(u);
    return u.updates[smallest_score_rows(scores, 1).front()];
}

Vec agg_mkrum(const UpdateSet& u) {
    const auto scores = krum_scores(u);
    const auto selected = smallest_score_rows(scores, u.count() - u.declared_f);
    Vec out(u.updates.front().size(), 0.0);
    for (int i : selected) add_inplace(out, u.updates[i]);
    scale_inplace(out, 1.0 / static_cast<double>(selected.size()));
    return out;
}

Vec aggregate(const std::string& name, const UpdateSet& u, const WeiszfeldOptions& gm_opts) {
    if (name == "mean") return agg_mean(u);
    if (name == "cwmed") return agg_cwmed(u);
    if (name == "cwtm") return agg_cwtm(u);
    if (name == "gm") return agg_gm(u, gm_opts);
    if (name == "krum") return agg_krum(u);
    if (name == "mkrum") return agg_mkrum(u);
    throw invalid_input("unknown aggregator: " + name);
}

bool is_known_aggregator(const std::string& name) {
    return name == "mean" || name == "cwmed" || name == "cwtm" || name == "gm" ||
           name == "krum" || name == "mkrum";
}

}  // namespace wola
