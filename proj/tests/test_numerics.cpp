#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wola/error.hpp"
#include "wola/geometric_median.hpp"
#include "wola/rng.hpp"
#include "wola/vector_ops.hpp"

using namespace wola;

namespace {

VectorBatch random_batch(Rng& rng, int n, int d, double scale = 1.0) {
    VectorBatch b(n, Vec(d));
    for (auto& row : b) {
        for (auto& x : row) x = scale * rng.normal();
    }
    return b;
}

}  // namespace

TEST_CASE("l2_norm basics") {
    CHECK(l2_norm({3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(l2_norm({0.0, 0.0, 0.0}) == 0.0);

    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        Vec v(8);
        for (auto& x : v) x = rng.normal();
        CHECK(l2_norm(v) == doctest::Approx(oracle::l2(v)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(l2_norm({1.0, std::nan("")}), invalid_input);
    CHECK_THROWS_AS(l2_norm({std::numeric_limits<double>::infinity()}), invalid_input);
}

TEST_CASE("pairwise squared distances") {
    const auto m = pairwise_sq_distances({{0.0, 0.0}, {3.0, 4.0}});
    CHECK(m[0][1] == doctest::Approx(25.0));
    CHECK(m[1][0] == doctest::Approx(25.0));
    CHECK(m[0][0] == 0.0);

    const auto single = pairwise_sq_distances({{1.0, 2.0}});
    CHECK(single.size() == 1);
    CHECK(single[0][0] == 0.0);

    Rng rng(11);
    const auto b = random_batch(rng, 5, 3);
    const auto got = pairwise_sq_distances(b);
    const auto want = oracle::pairwise_sq(b);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(got[i][j] == doctest::Approx(want[i][j]).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(pairwise_sq_distances({{1.0}, {1.0, 2.0}}), invalid_input);
}

TEST_CASE("pairwise distances satisfy the triangle inequality") {
    Rng rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const auto b = random_batch(rng, 3, 4);
        const auto m = pairwise_sq_distances(b);
        const double ab = std::sqrt(m[0][1]), bc = std::sqrt(m[1][2]), ac = std::sqrt(m[0][2]);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("coordinate median") {
    CHECK(coordinate_median({{1, 5}, {2, 6}, {9, 7}}) == Vec{2, 6});
    CHECK(coordinate_median({{0, 0}, {2, 2}}) == Vec{1, 1});

    Rng rng(17);
    auto b = random_batch(rng, 7, 3);
    const auto want = oracle::coordinate_median(b);
    CHECK(coordinate_median(b) == want);

    // permutation invariance
    rng.shuffle(b);
    CHECK(coordinate_median(b) == want);
}

TEST_CASE("weiszfeld: symmetric and collinear configurations") {
    const VectorBatch square = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
    const auto center = weiszfeld_geometric_median(square);
    CHECK(center[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(center[1] == doctest::Approx(1.0).epsilon(1e-6));

    const auto median = weiszfeld_geometric_median({{0.0}, {1.0}, {10.0}});
    CHECK(median[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("weiszfeld vs refining grid search") {
    Rng rng(23);
    for (int rep = 0; rep < 6; ++rep) {
        const auto rows = random_batch(rng, 6, 2, 2.0);
        const auto x = weiszfeld_geometric_median(rows);
        const double got = geometric_median_objective(x, rows);
        const double want = oracle::grid_search_gm_objective(rows);
        CHECK(std::abs(got - want) <= 1e-4);
    }
}

TEST_CASE("weiszfeld output stays in the convex hull") {
    Rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        const auto rows = random_batch(rng, 5, 3);
        const auto x = weiszfeld_geometric_median(rows);
        for (std::size_t k = 0; k < x.size(); ++k) {
            double lo = rows[0][k], hi = rows[0][k];
            for (const auto& r : rows) {
                lo = std::min(lo, r[k]);
                hi = std::max(hi, r[k]);
            }
            CHECK(x[k] >= lo - 1e-9);
            CHECK(x[k] <= hi + 1e-9);
        }
        CHECK(geometric_median_objective(x, rows) <=
              geometric_median_objective(coordinate_mean(rows), rows) + 1e-9);
    }
}

TEST_CASE("weiszfeld edge cases") {
    // single row and identical rows converge immediately
    CHECK(weiszfeld_geometric_median({{4.0, -1.0}}) == Vec{4.0, -1.0});
    const auto same = weiszfeld_geometric_median({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    CHECK(same[0] == doctest::Approx(1.0));

    // exhausting the iteration budget reports the last iterate
    WeiszfeldOptions opts;
    opts.tol = 1e-16;
    opts.max_iter = 2;
    try {
        weiszfeld_geometric_median({{0.0, 0.0}, {5.0, 1.0}, {-3.0, 2.0}, {1.0, -7.0}}, opts);
        FAIL("expected convergence_failure");
    } catch (const convergence_failure& e) {
        CHECK(e.last_iterate().size() == 2);
    }
}

TEST_CASE("batch helpers reject bad inputs") {
    CHECK_THROWS_AS(batch_dim({}), invalid_input);
    CHECK_THROWS_AS(coordinate_mean({}), invalid_input);
    CHECK_THROWS_AS(weighted_mean({{1.0}}, {-1.0}), invalid_input);
    CHECK_THROWS_AS(weighted_mean({{1.0}}, {0.0}), invalid_input);
}
