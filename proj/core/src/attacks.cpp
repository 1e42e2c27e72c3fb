#include "wola/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wola/error.hpp"

namespace wola {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("normal_quantile: p must be in (0,1)");
    if (p < 0.5) return -normal_quantile(1.0 - p);
    // Phi(x) = (1 + erf(x/sqrt(2))) / 2 is increasing; bisect on [0, 40].
    double lo = 0.0, hi = 40.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double cdf = 0.5 * (1.0 + std::erf(mid / std::sqrt(2.0)));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double alie_z(int n, int f) {
    if (f < 1 || n - f < 2) throw invalid_input("alie_z: need f >= 1 and n-f >= 2");
    const int h = n - f;
    const int s = n / 2 + 1 - f;
    const double p = static_cast<double>(h - s) / static_cast<double>(h);
    if (p <= 0.5) return 0.0;  // floor at zero
    return normal_quantile(p);
}

namespace {

void check_attack_args(const VectorBatch& honest, int n, int f) {
    batch_dim(honest);
    if (f < 1) throw invalid_input("attack: f must be >= 1");
    if (static_cast<int>(honest.size()) != n - f) {
        throw invalid_input("attack: expected n-f honest rows");
    }
}

VectorBatch replicate(Vec row, int f) {
    VectorBatch out;
    out.reserve(f);
    for (int k = 0; k < f; ++k) out.push_back(row);
    return out;
}

}  // namespace

VectorBatch attack_alie(const VectorBatch& honest, int n, int f,
                        std::optional<double> z_override) {
    check_attack_args(honest, n, f);
    const std::size_t h = honest.size();
    if (h < 2) throw invalid_input("alie: needs at least two honest rows");
    const double z = z_override ? *z_override : alie_z(n, f);

    const Vec mean = coordinate_mean(honest);
    Vec row(mean.size());
    for (std::size_t k = 0; k < mean.size(); ++k) {
        double var = 0.0;
        for (const auto& r : honest) {
            const double d = r[k] - mean[k];
            var += d * d;
        }
        var /= static_cast<double>(h);  // population variance
        row[k] = mean[k] - z * std::sqrt(var);
    }
    return replicate(std::move(row), f);
}

VectorBatch attack_foe(const VectorBatch& honest, int f, double epsilon) {
    batch_dim(honest);
    if (f < 1) throw invalid_input("attack: f must be >= 1");
    return replicate(scaled(coordinate_mean(honest), -epsilon), f);
}

VectorBatch attack_sf(const VectorBatch& honest, int f) { return attack_foe(honest, f, 1.0); }

int mimic_select(const VectorBatch& honest, int f) {
    batch_dim(honest);
    if (f < 1) throw invalid_input("mimic: f must be >= 1");
    const int h = static_cast<int>(honest.size());
    if (h < 2) throw invalid_input("mimic: needs at least two honest rows");

    const Vec center = coordinate_mean(honest);
    std::vector<double> center_dist(h);
    for (int j = 0; j < h; ++j) center_dist[j] = l2_distance(honest[j], center);

    const auto dist2 = pairwise_sq_distances(honest);
    std::vector<double> scores(h, 0.0);
    std::vector<int> order(h);
    for (int i = 0; i < h; ++i) {
        std::iota(order.begin(), order.end(), 0);
        // Decreasing distance from row i; rank 1 is the farthest row and
        // rank h is row i itself (even under distance ties), remaining ties
        // by row index.
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const bool self_a = a == i, self_b = b == i;
            if (self_a != self_b) return self_b;
            if (dist2[i][a] != dist2[i][b]) return dist2[i][a] > dist2[i][b];
            return a < b;
        });
        for (int r = 1; r <= h; ++r) {
            const int j = order[r - 1];
            scores[j] += static_cast<double>(std::min(f, r)) * center_dist[j];
        }
    }

    int best = 0;
    for (int j = 1; j < h; ++j) {
        if (scores[j] > scores[best]) best = j;
    }
    return best;
}

VectorBatch attack_mimic(const VectorBatch& honest, int f) {
    return replicate(honest[mimic_select(honest, f)], f);
}

LabeledDataset flip_labels(const LabeledDataset& ds) {
    LabeledDataset out = ds;
    for (auto& y : out.labels) y = ds.num_classes - 1 - y;
    return out;
}

WorkerShard flip_labels(const WorkerShard& shard) { return make_shard(flip_labels(shard.data)); }

bool is_known_attack(const std::string& name) {
    return name == "none" || name == "alie" || name == "foe" || name == "sf" || name == "lf" ||
           name == "mimic";
}

}  // namespace wola
