#include <doctest.h>

#include <cmath>

#include "wola/error.hpp"
#include "wola/preaggregators.hpp"
#include "wola/rng.hpp"

using namespace wola;

namespace {

UpdateSet make_set(VectorBatch rows, int f = 0) {
    return UpdateSet{.updates = std::move(rows), .declared_f = f};
}

}  // namespace

TEST_CASE("bucketing collapses to the identity when buckets shrink to one") {
    Rng rng(3);
    UpdateSet u;
    u.declared_f = 6;
    for (int i = 0; i < 17; ++i) u.updates.push_back({rng.normal(), rng.normal()});
    const auto out = pre_bucketing(u, 6, /*seed=*/7);  // s = 17/12 = 1
    CHECK(out.updates == u.updates);
    const auto out8 = pre_bucketing(u, 8, /*seed=*/7);
    CHECK(out8.updates == u.updates);

    CHECK_THROWS_AS(pre_bucketing(u, 0, 7), invalid_input);
}

TEST_CASE("bucketing: n=4, f=1 pairs rows and preserves the overall mean") {
    const Vec a{1.0, 2.0}, b{5.0, -2.0};
    const auto u = make_set({a, a, b, b}, 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto out = pre_bucketing(u, 1, seed);  // s = 2
        CHECK(out.updates.size() == 2);
        Vec total(2, 0.0);
        for (const auto& row : out.updates) add_inplace(total, row);
        scale_inplace(total, 0.5);
        CHECK(total[0] == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(total[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(out.declared_f == 1);
    }
}

TEST_CASE("bucketing preserves the mean whenever s divides n") {
    Rng rng(5);
    UpdateSet u;
    u.declared_f = 2;
    for (int i = 0; i < 12; ++i) u.updates.push_back({rng.normal(), rng.normal(), rng.normal()});
    const auto want = coordinate_mean(u.updates);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto out = pre_bucketing(u, 2, seed);  // s = 3 divides 12
        CHECK(out.updates.size() == 4);
        const auto got = coordinate_mean(out.updates);
        for (int k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
    }
    // deterministic per seed
    CHECK(pre_bucketing(u, 2, 42).updates == pre_bucketing(u, 2, 42).updates);
}

TEST_CASE("bucketing reduces honest variance on average") {
    Rng rng(7);
    UpdateSet u;
    u.declared_f = 2;
    for (int i = 0; i < 12; ++i) u.updates.push_back({rng.normal()});
    auto variance = [](const VectorBatch& rows) {
        double mean = 0.0;
        for (const auto& r : rows) mean += r[0];
        mean /= rows.size();
        double acc = 0.0;
        for (const auto& r : rows) acc += (r[0] - mean) * (r[0] - mean);
        return acc / rows.size();
    };
    const double input_var = variance(u.updates);
    double mean_output_var = 0.0;
    const int trials = 1000;
    for (int seed = 0; seed < trials; ++seed) {
        mean_output_var += variance(pre_bucketing(u, 2, seed).updates);
    }
    mean_output_var /= trials;
    CHECK(mean_output_var <= input_var);
}

TEST_CASE("nearest-neighbor mixing") {
    // f=0: every row becomes the global mean
    Rng rng(9);
    UpdateSet u;
    u.declared_f = 0;
    for (int i = 0; i < 5; ++i) u.updates.push_back({rng.normal(), rng.normal()});
    const auto mixed = pre_nnm(u);
    const auto mean = coordinate_mean(u.updates);
    for (const auto& row : mixed.updates) {
        for (int k = 0; k < 2; ++k) CHECK(row[k] == doctest::Approx(mean[k]).epsilon(1e-12));
    }

    // hand-enumerated 1-d instance
    const auto line = pre_nnm(make_set({{0.0}, {1.0}, {10.0}}, 1));
    CHECK(line.updates[0][0] == doctest::Approx(0.5));
    CHECK(line.updates[1][0] == doctest::Approx(0.5));
    CHECK(line.updates[2][0] == doctest::Approx(5.5));

    // identical rows unchanged
    const auto same = pre_nnm(make_set(VectorBatch(4, Vec{2.0, 2.0}), 1));
    for (const auto& row : same.updates) CHECK(row == Vec{2.0, 2.0});
}

TEST_CASE("nnm agrees with brute-force neighbour enumeration") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + static_cast<int>(rng.bounded(5));
        const int f = static_cast<int>(rng.bounded((n - 1) / 2 + 1));
        UpdateSet u;
        u.declared_f = f;
        for (int i = 0; i < n; ++i) u.updates.push_back({rng.normal(), rng.normal()});
        const auto got = pre_nnm(u);
        for (int i = 0; i < n; ++i) {
            // brute force: sort indices by (distance, index), take n-f
            std::vector<std::pair<double, int>> by_dist;
            for (int j = 0; j < n; ++j) by_dist.push_back({sq_distance(u.updates[i], u.updates[j]), j});
            std::sort(by_dist.begin(), by_dist.end());
            Vec mean(2, 0.0);
            for (int k = 0; k < n - f; ++k) add_inplace(mean, u.updates[by_dist[k].second]);
            scale_inplace(mean, 1.0 / (n - f));
            for (int k = 0; k < 2; ++k) {
                CHECK(got.updates[i][k] == doctest::Approx(mean[k]).epsilon(1e-12));
            }
        }
        // convex hull bounds
        for (int k = 0; k < 2; ++k) {
            double lo = u.updates[0][k], hi = u.updates[0][k];
            for (const auto& row : u.updates) {
                lo = std::min(lo, row[k]);
                hi = std::max(hi, row[k]);
            }
            for (const auto& row : got.updates) {
                CHECK(row[k] >= lo - 1e-12);
                CHECK(row[k] <= hi + 1e-12);
            }
        }
    }
}

TEST_CASE("foundationfl scoring and replication") {
    const auto out = pre_foundationfl(make_set({{0.0}, {1.0}, {2.0}}, 1), 2);
    REQUIRE(out.updates.size() == 5);
    // the middle row (score 1) beats the extremes (score 0)
    CHECK(out.updates[3] == Vec{1.0});
    CHECK(out.updates[4] == Vec{1.0});
    // original rows preserved verbatim as a prefix
    CHECK(out.updates[0] == Vec{0.0});
    CHECK(out.updates[1] == Vec{1.0});
    CHECK(out.updates[2] == Vec{2.0});

    const auto same = pre_foundationfl(make_set(VectorBatch(3, Vec{4.0}), 1), 3);
    CHECK(same.updates.size() == 6);
    for (const auto& row : same.updates) CHECK(row == Vec{4.0});

    CHECK_THROWS_AS(pre_foundationfl(make_set({{1.0}}, 0), 0), invalid_input);
}

TEST_CASE("preaggregate dispatch and the n/2 default") {
    Rng rng(13);
    UpdateSet u;
    u.declared_f = 6;
    for (int i = 0; i < 17; ++i) u.updates.push_back({rng.normal()});

    const auto found = preaggregate("foundationfl", u, 6, /*m=*/0, /*seed=*/1);
    CHECK(found.updates.size() == 17 + 8);  // m = n/2 rounds down to 8

    const auto none = preaggregate("none", u, 6, 0, 1);
    CHECK(none.updates == u.updates);

    CHECK_THROWS_AS(preaggregate("mystery", u, 6, 0, 1), invalid_input);
    CHECK(is_known_preaggregator("nnm"));
    CHECK_FALSE(is_known_preaggregator("bucket"));
}
