#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wola/aggregators.hpp"
#include "wola/error.hpp"
#include "wola/rng.hpp"

using namespace wola;

namespace {

UpdateSet random_set(Rng& rng, int n, int d, int f) {
    UpdateSet u;
    u.declared_f = f;
    u.updates.assign(n, Vec(d));
    for (auto& row : u.updates) {
        for (auto& x : row) x = rng.normal();
    }
    return u;
}

UpdateSet shifted(const UpdateSet& u, double c) {
    UpdateSet out = u;
    for (auto& row : out.updates) {
        for (auto& x : row) x += c;
    }
    return out;
}

UpdateSet permuted(const UpdateSet& u, Rng& rng) {
    UpdateSet out = u;
    rng.shuffle(out.updates);
    return out;
}

void check_close(const Vec& a, const Vec& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= tol);
}

}  // namespace

TEST_CASE("mean aggregation") {
    UpdateSet u{.updates = {{0, 0}, {2, 2}}, .declared_f = 0};
    CHECK(agg_mean(u) == Vec{1, 1});
    UpdateSet single{.updates = {{3, -1}}, .declared_f = 0};
    CHECK(agg_mean(single) == Vec{3, -1});

    Rng rng(3);
    const auto r = random_set(rng, 6, 3, 0);
    Vec want(3, 0.0);
    for (const auto& row : r.updates) {
        for (int k = 0; k < 3; ++k) want[k] += row[k] / 6.0;
    }
    check_close(agg_mean(r), want, 1e-12);
}

TEST_CASE("coordinate-wise median resists a minority of corrupted rows") {
    Rng rng(5);
    auto u = random_set(rng, 7, 4, 0);
    // corrupt one coordinate of 3 rows (< n/2) to a huge value
    for (int i = 0; i < 3; ++i) u.updates[i][2] = 1e9;
    const auto med = agg_cwmed(u);
    double lo = u.updates[3][2], hi = u.updates[3][2];
    for (int i = 3; i < 7; ++i) {
        lo = std::min(lo, u.updates[i][2]);
        hi = std::max(hi, u.updates[i][2]);
    }
    CHECK(med[2] >= lo);
    CHECK(med[2] <= hi);

    const auto perm = permuted(u, rng);
    CHECK(agg_cwmed(perm) == med);

    const auto small = random_set(rng, 3, 2, 0);
    CHECK(agg_cwmed(small) == oracle::coordinate_median(small.updates));
}

TEST_CASE("trimmed mean") {
    UpdateSet u{.updates = {{1}, {2}, {3}, {4}, {5}}, .declared_f = 1};
    CHECK(agg_cwtm(u) == Vec{3});

    Rng rng(7);
    auto r = random_set(rng, 6, 2, 0);
    check_close(agg_cwtm(r), agg_mean(r), 1e-12);  // f = 0: no trimming

    auto r7 = random_set(rng, 7, 3, 2);
    check_close(agg_cwtm(r7), oracle::trimmed_mean(r7.updates, 2), 1e-12);

    UpdateSet bad{.updates = {{1}, {2}, {3}, {4}}, .declared_f = 2};
    CHECK_THROWS_AS(agg_cwtm(bad), invalid_input);
}

TEST_CASE("geometric-median aggregation") {
    UpdateSet u{.updates = {{1, 1}, {1, 1}, {50, -3}}, .declared_f = 1};
    const auto gm = agg_gm(u);
    CHECK(gm[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(gm[1] == doctest::Approx(1.0).epsilon(1e-6));

    UpdateSet square{.updates = {{0, 0}, {2, 0}, {0, 2}, {2, 2}}, .declared_f = 0};
    check_close(agg_gm(square), {1.0, 1.0}, 1e-6);

    Rng rng(11);
    for (int rep = 0; rep < 4; ++rep) {
        const auto r = random_set(rng, 5, 2, 0);
        const auto x = agg_gm(r);
        CHECK(std::abs(geometric_median_objective(x, r.updates) -
                       oracle::grid_search_gm_objective(r.updates)) <= 1e-4);
    }
}

TEST_CASE("krum scores") {
    // three clustered rows plus a far outlier: the outlier scores worst
    UpdateSet u{.updates = {{0.0, 0.1}, {0.1, 0.0}, {0.05, 0.05}, {9.0, 9.0}}, .declared_f = 1};
    const auto scores = krum_scores(u);
    const auto want = oracle::krum_scores_bruteforce(u.updates, 1);
    for (int i = 0; i < 4; ++i) CHECK(scores[i] == doctest::Approx(want[i]).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(scores[3] > scores[i]);

    UpdateSet same{.updates = {{1, 1}, {1, 1}, {1, 1}, {1, 1}}, .declared_f = 1};
    for (double s : krum_scores(same)) CHECK(s == 0.0);

    UpdateSet tiny{.updates = {{1}, {2}, {3}}, .declared_f = 1};
    CHECK_THROWS_AS(krum_scores(tiny), invalid_input);  // n < f + 3
}

TEST_CASE("krum scores are permutation-equivariant") {
    Rng rng(13);
    const auto u = random_set(rng, 6, 3, 1);
    const auto scores = krum_scores(u);
    UpdateSet rev = u;
    std::reverse(rev.updates.begin(), rev.updates.end());
    const auto rev_scores = krum_scores(rev);
    for (int i = 0; i < 6; ++i) {
        CHECK(rev_scores[5 - i] == doctest::Approx(scores[i]).epsilon(1e-12));
    }
}

TEST_CASE("multi-krum") {
    UpdateSet u{.updates = {{0.0, 0.1}, {0.1, 0.0}, {0.05, 0.05}, {9.0, 9.0}}, .declared_f = 1};
    // the outlier is excluded from the n - f = 3 selected rows
    Vec expect(2, 0.0);
    for (int i = 0; i < 3; ++i) add_inplace(expect, u.updates[i]);
    scale_inplace(expect, 1.0 / 3.0);
    check_close(agg_mkrum(u), expect, 1e-12);

    Rng rng(17);
    auto r = random_set(rng, 5, 2, 0);
    check_close(agg_mkrum(r), agg_mean(r), 1e-12);  // f = 0 keeps all rows

    // krum (m = 1) returns the minimum-score row verbatim
    const auto scores = krum_scores(u);
    int best = 0;
    for (int i = 1; i < 4; ++i) {
        if (scores[i] < scores[best]) best = i;
    }
    CHECK(agg_krum(u) == u.updates[best]);
}

TEST_CASE("aggregators agree with oracles on random instances") {
    Rng rng(19);
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 3 + static_cast<int>(rng.bounded(7));  // 3..9
        const int d = 1 + static_cast<int>(rng.bounded(4));
        const int f_max = std::max(0, (n - 3));
        const int f = std::min(static_cast<int>(rng.bounded(f_max + 1)), (n - 1) / 2);
        const auto u = random_set(rng, n, d, f);

        CHECK(agg_cwmed(u) == oracle::coordinate_median(u.updates));
        check_close(agg_cwtm(u), oracle::trimmed_mean(u.updates, f), 1e-12);
        if (n >= f + 3) {
            const auto scores = krum_scores(u);
            const auto want = oracle::krum_scores_bruteforce(u.updates, f);
            for (int i = 0; i < n; ++i) {
                CHECK(scores[i] == doctest::Approx(want[i]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("shared aggregator properties") {
    Rng rng(23);
    const std::vector<std::string> rules{"mean", "cwmed", "cwtm", "gm", "krum", "mkrum"};
    for (int rep = 0; rep < 8; ++rep) {
        const auto u = random_set(rng, 7, 3, 2);
        for (const auto& rule : rules) {
            const auto out = aggregate(rule, u);

            // translation equivariance
            const auto out_shift = aggregate(rule, shifted(u, 2.5));
            for (std::size_t k = 0; k < out.size(); ++k) {
                CHECK(out_shift[k] - out[k] == doctest::Approx(2.5).epsilon(1e-9));
            }

            // output bounded by input coordinate ranges
            for (std::size_t k = 0; k < out.size(); ++k) {
                double lo = u.updates[0][k], hi = u.updates[0][k];
                for (const auto& row : u.updates) {
                    lo = std::min(lo, row[k]);
                    hi = std::max(hi, row[k]);
                }
                CHECK(out[k] >= lo - 1e-9);
                CHECK(out[k] <= hi + 1e-9);
            }

            // permutation invariance
            Rng prng(100 + rep);
            const auto out_perm = aggregate(rule, permuted(u, prng));
            for (std::size_t k = 0; k < out.size(); ++k) {
                CHECK(out_perm[k] == doctest::Approx(out[k]).epsilon(1e-9));
            }
        }
    }

    // f-consistency: identical rows are returned exactly
    UpdateSet same{.updates = VectorBatch(7, Vec{0.5, -2.0}), .declared_f = 2};
    for (const auto& rule : rules) {
        const auto out = aggregate(rule, same);
        CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(out[1] == doctest::Approx(-2.0).epsilon(1e-9));
    }

    CHECK_THROWS_AS(aggregate("nope", same), invalid_input);
    CHECK(is_known_aggregator("cwmed"));
    CHECK_FALSE(is_known_aggregator("median"));
}
