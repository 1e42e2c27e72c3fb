#include "wola/preaggregators.hpp"

#include <algorithm>
#include <numeric>

#include "wola/error.hpp"
#include "wola/rng.hpp"

namespace wola {

UpdateSet pre_bucketing(const UpdateSet& u, int f, std::uint64_t seed) {
    batch_dim(u.updates);
    if (f < 1) throw invalid_input("bucketing: f must be >= 1 (use the identity otherwise)");
    const int n = u.count();
    const int s = n / (2 * f);
    if (s <= 1) return u;

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);

    UpdateSet out;
    out.declared_f = u.declared_f;
    for (int start = 0; start < n; start += s) {
        const int end = std::min(start + s, n);
        Vec mean(u.updates.front().size(), 0.0);
        for (int k = start; k < end; ++k) add_inplace(mean, u.updates[perm[k]]);
        scale_inplace(mean, 1.0 / static_cast<double>(end - start));
        out.updates.push_back(std::move(mean));
    }
    return out;
}

UpdateSet pre_nnm(const UpdateSet& u) {
    batch_dim(u.updates);
    const int n = u.count();
    const int f = u.declared_f;
    if (n <= f) throw invalid_input("nnm: need n > declared_f");
    const auto dist2 = pairwise_sq_distances(u.updates);
    const int keep = n - f;

    UpdateSet out;
    out.declared_f = u.declared_f;
    out.updates.resize(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist2[i][a] != dist2[i][b]) return dist2[i][a] < dist2[i][b];
            return a < b;
        });
        Vec mean(u.updates.front().size(), 0.0);
        for (int k = 0; k < keep; ++k) add_inplace(mean, u.updates[order[k]]);
        scale_inplace(mean, 1.0 / static_cast<double>(keep));
        out.updates[i] = std::move(mean);
    }
    return out;
}

UpdateSet pre_foundationfl(const UpdateSet& u, int m) {
    const std::size_t d = batch_dim(u.updates);
    if (m < 1) throw invalid_input("foundationfl: m must be >= 1");
    const int n = u.count();

    Vec hi(d), lo(d);
    for (std::size_t k = 0; k < d; ++k) {
        double mx = u.updates[0][k], mn = u.updates[0][k];
        for (int i = 1; i < n; ++i) {
            mx = std::max(mx, u.updates[i][k]);
            mn = std::min(mn, u.updates[i][k]);
        }
        hi[k] = mx;
        lo[k] = mn;
    }

    int best = 0;
    double best_score = -1.0;
    for (int i = 0; i < n; ++i) {
        const double score =
            std::min(l2_distance(hi, u.updates[i]), l2_distance(lo, u.updates[i]));
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }

    UpdateSet out = u;
    for (int k = 0; k < m; ++k) out.updates.push_back(u.updates[best]);
    return out;
}

UpdateSet preaggregate(const std::string& name, const UpdateSet& u, int f, int m,
                       std::uint64_t seed) {
    if (name == "none") return u;
    if (name == "bucketing") return f >= 1 ? pre_bucketing(u, f, seed) : u;
    if (name == "nnm") return pre_nnm(u);
    if (name == "foundationfl") return pre_foundationfl(u, m > 0 ? m : u.count() / 2);
    throw invalid_input("unknown pre-aggregator: " + name);
}

bool is_known_preaggregator(const std::string& name) {
    return name == "none" || name == "bucketing" || name == "nnm" || name == "foundationfl";
}

}  // namespace wola
