#include <doctest.h>

#include <cmath>

#include "wola/error.hpp"
#include "wola/model.hpp"
#include "wola/rng.hpp"

using namespace wola;

namespace {

LabeledDataset random_dataset(Rng& rng, int n, int d, int c_count) {
    LabeledDataset ds;
    ds.num_classes = c_count;
    for (int k = 0; k < n; ++k) {
        Vec x(d);
        for (auto& v : x) v = rng.normal();
        ds.features.push_back(std::move(x));
        ds.labels.push_back(static_cast<int>(rng.bounded(c_count)));
    }
    return ds;
}

ParamVector random_params(const ModelSpec& spec, Rng& rng, double scale = 0.5) {
    ParamVector theta(spec.param_count());
    for (auto& t : theta) t = scale * rng.normal();
    return theta;
}

double max_rel_error(const Vec& got, const Vec& want) {
    double worst = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
        const double denom = std::max(1.0, std::abs(want[k]));
        worst = std::max(worst, std::abs(got[k] - want[k]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("parameter counts") {
    ModelSpec sm{.kind = ModelKind::softmax_regression, .feature_dim = 4, .num_classes = 3};
    CHECK(sm.param_count() == 15);

    ModelSpec mlp{.kind = ModelKind::mlp, .feature_dim = 2, .num_classes = 2, .hidden_dim = 8};
    CHECK(mlp.param_count() == 42);

    CHECK_THROWS_AS((ModelSpec{.kind = ModelKind::softmax_regression, .feature_dim = 0,
                               .num_classes = 2}
                         .param_count()),
                    invalid_input);
}

TEST_CASE("init_params: deterministic, zero biases, bounded weights") {
    ModelSpec spec{.kind = ModelKind::mlp, .feature_dim = 3, .num_classes = 4, .hidden_dim = 5};
    const auto a = init_params(spec, 9);
    const auto b = init_params(spec, 9);
    CHECK(a == b);
    CHECK(a != init_params(spec, 10));

    // biases sit after each weight block and start at zero
    const int w1 = 5 * 3;
    for (int k = 0; k < 5; ++k) CHECK(a[w1 + k] == 0.0);
    const int b2 = w1 + 5 + 4 * 5;
    for (int k = 0; k < 4; ++k) CHECK(a[b2 + k] == 0.0);

    const double bound1 = std::sqrt(6.0 / (3 + 5));
    for (int k = 0; k < w1; ++k) CHECK(std::abs(a[k]) <= bound1);
}

TEST_CASE("pointwise loss: uniform softmax and the direct formula") {
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 3, .num_classes = 2};
    const ParamVector zeros(spec.param_count(), 0.0);
    CHECK(pointwise_loss(spec, zeros, {1.0, -2.0, 0.5}, 0) == doctest::Approx(std::log(2.0)));
    // with zero parameters the loss cannot depend on x
    CHECK(pointwise_loss(spec, zeros, {5.0, 5.0, -5.0}, 1) == doctest::Approx(std::log(2.0)));

    Rng rng(31);
    ModelSpec mlp{.kind = ModelKind::mlp, .feature_dim = 4, .num_classes = 3, .hidden_dim = 6,
                  .activation = Activation::tanh};
    const auto theta = random_params(mlp, rng);
    Vec x(4);
    for (auto& v : x) v = rng.normal();
    const auto scores = logits(mlp, theta, x);
    // independent log-sum-exp evaluation
    double lse = 0.0;
    for (double s : scores) lse += std::exp(s);
    lse = std::log(lse);
    CHECK(pointwise_loss(mlp, theta, x, 2) == doctest::Approx(lse - scores[2]).epsilon(1e-12));

    CHECK_THROWS_AS(pointwise_loss(spec, zeros, {0, 0, 0}, 5), invalid_input);
}

TEST_CASE("weighted gradient: unweighted mean and duplication equivalence") {
    Rng rng(37);
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 3, .num_classes = 3};
    const auto ds = random_dataset(rng, 6, 3, 3);
    const auto theta = random_params(spec, rng);
    const auto idx = full_batch_indices(ds);
    const std::vector<double> ones(6, 1.0);

    // mean of per-sample gradients
    Vec mean(theta.size(), 0.0);
    for (int k = 0; k < 6; ++k) {
        const std::vector<std::int32_t> one_idx{static_cast<std::int32_t>(k)};
        const std::vector<double> w{1.0};
        add_inplace(mean, weighted_batch_gradient(spec, theta, {&ds, one_idx}, w, 0.0));
    }
    scale_inplace(mean, 1.0 / 6.0);
    const auto got = weighted_batch_gradient(spec, theta, {&ds, idx}, ones, 0.0);
    CHECK(max_rel_error(got, mean) < 1e-12);

    // weight 2 == duplicated sample with weight 1 (normalisation adjusted:
    // batch of {s0 x2} vs batch {s0, s0})
    const std::vector<std::int32_t> dup{0, 0};
    const std::vector<double> w11{1.0, 1.0};
    const std::vector<std::int32_t> single{0};
    const std::vector<double> w2{2.0};
    const auto g_dup = weighted_batch_gradient(spec, theta, {&ds, dup}, w11, 0.0);
    auto g_w2 = weighted_batch_gradient(spec, theta, {&ds, single}, w2, 0.0);
    scale_inplace(g_w2, 0.5);  // same denominator as the two-sample batch
    CHECK(max_rel_error(g_w2, g_dup) < 1e-12);
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng(41);
    for (const auto kind : {ModelKind::softmax_regression, ModelKind::mlp}) {
        ModelSpec spec{.kind = kind, .feature_dim = 3, .num_classes = 3, .hidden_dim = 4,
                       .activation = Activation::tanh};
        const auto ds = random_dataset(rng, 5, 3, 3);
        const auto theta = random_params(spec, rng);
        const auto idx = full_batch_indices(ds);
        std::vector<double> weights(5);
        for (auto& w : weights) w = rng.uniform() + 0.1;

        const auto got = weighted_batch_gradient(spec, theta, {&ds, idx}, weights, 1e-3);
        const auto fd = finite_difference_gradient(spec, theta, {&ds, idx}, weights, 1e-3, 1e-5);
        CHECK(max_rel_error(got, fd) <= 1e-5);
    }
}

TEST_CASE("gradient is linear in the weights (regulariser folded once)") {
    Rng rng(43);
    ModelSpec spec{.kind = ModelKind::mlp, .feature_dim = 2, .num_classes = 2, .hidden_dim = 3,
                   .activation = Activation::tanh};
    const auto ds = random_dataset(rng, 4, 2, 2);
    const auto theta = random_params(spec, rng);
    const auto idx = full_batch_indices(ds);
    std::vector<double> w1(4), w2(4), sum(4);
    for (int k = 0; k < 4; ++k) {
        w1[k] = rng.uniform();
        w2[k] = rng.uniform();
        sum[k] = w1[k] + w2[k];
    }
    const double l2 = 1e-4;
    const auto g_sum = weighted_batch_gradient(spec, theta, {&ds, idx}, sum, l2);
    auto g_split = weighted_batch_gradient(spec, theta, {&ds, idx}, w1, l2);
    add_inplace(g_split, weighted_batch_gradient(spec, theta, {&ds, idx}, w2, 0.0));
    CHECK(max_rel_error(g_sum, g_split) < 1e-12);
}

TEST_CASE("zero weights leave only the regulariser") {
    Rng rng(47);
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 2, .num_classes = 2};
    const auto ds = random_dataset(rng, 3, 2, 2);
    const auto theta = random_params(spec, rng);
    const std::vector<double> zeros(3, 0.0);
    const auto idx = full_batch_indices(ds);
    const auto g = weighted_batch_gradient(spec, theta, {&ds, idx}, zeros, 0.5);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(g[k] == doctest::Approx(0.5 * theta[k]).epsilon(1e-12));
    }
}

TEST_CASE("finite differences shrink quadratically on a smooth model") {
    Rng rng(53);
    ModelSpec spec{.kind = ModelKind::mlp, .feature_dim = 2, .num_classes = 2, .hidden_dim = 3,
                   .activation = Activation::tanh};
    const auto ds = random_dataset(rng, 3, 2, 2);
    const auto theta = random_params(spec, rng);
    const auto idx = full_batch_indices(ds);
    const std::vector<double> ones(3, 1.0);
    const auto exact = weighted_batch_gradient(spec, theta, {&ds, idx}, ones, 0.0);

    auto err = [&](double h) {
        const auto fd = finite_difference_gradient(spec, theta, {&ds, idx}, ones, 0.0, h);
        double worst = 0.0;
        for (std::size_t k = 0; k < fd.size(); ++k) {
            worst = std::max(worst, std::abs(fd[k] - exact[k]));
        }
        return worst;
    };
    CHECK(err(1e-4) < 1e-6);
    CHECK(err(1e-2) / std::max(err(1e-3), 1e-14) > 20.0);  // ~O(h^2) decay
}

TEST_CASE("loss properties: non-negativity and argmax consistency") {
    Rng rng(59);
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 3, .num_classes = 4};
    for (int rep = 0; rep < 20; ++rep) {
        const auto theta = random_params(spec, rng);
        Vec x(3);
        for (auto& v : x) v = rng.normal();
        const int top = predict(spec, theta, x);
        const double best = pointwise_loss(spec, theta, x, top);
        CHECK(best >= 0.0);
        for (int y = 0; y < 4; ++y) CHECK(best <= pointwise_loss(spec, theta, x, y) + 1e-12);
    }
}

TEST_CASE("prediction: ties and overfitting") {
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 2, .num_classes = 3};
    const ParamVector zeros(spec.param_count(), 0.0);
    CHECK(predict(spec, zeros, {3.0, -1.0}) == 0);  // uniform logits, smallest index

    // a single sample is learned to convergence
    LabeledDataset ds;
    ds.num_classes = 3;
    ds.features.push_back({1.0, -0.5});
    ds.labels.push_back(2);
    ParamVector theta = zeros;
    const std::vector<std::int32_t> idx{0};
    const std::vector<double> w{1.0};
    for (int t = 0; t < 300; ++t) {
        const auto g = weighted_batch_gradient(spec, theta, {&ds, idx}, w, 0.0);
        axpy_inplace(theta, -0.5, g);
    }
    CHECK(predict(spec, theta, ds.features[0]) == 2);
    CHECK(pointwise_loss(spec, theta, ds.features[0], 2) < 0.05);
}

TEST_CASE("relu kink detection helper") {
    ModelSpec spec{.kind = ModelKind::mlp, .feature_dim = 2, .num_classes = 2, .hidden_dim = 2,
                   .activation = Activation::relu};
    LabeledDataset ds;
    ds.num_classes = 2;
    ds.features.push_back({1.0, 1.0});
    ds.labels.push_back(0);
    ParamVector theta(spec.param_count(), 0.0);
    theta[0] = 0.5;
    theta[1] = -0.5;  // first hidden pre-activation exactly 0
    theta[2] = 1.0;
    theta[3] = 0.25;  // second: 1.25
    const auto idx = full_batch_indices(ds);
    CHECK(min_abs_preactivation(spec, theta, {&ds, idx}) == doctest::Approx(0.0));

    ModelSpec sm{.kind = ModelKind::softmax_regression, .feature_dim = 2, .num_classes = 2};
    ParamVector t2(sm.param_count(), 0.0);
    CHECK(std::isinf(min_abs_preactivation(sm, t2, {&ds, idx})));
}

TEST_CASE("batch validation errors") {
    ModelSpec spec{.kind = ModelKind::softmax_regression, .feature_dim = 2, .num_classes = 2};
    const ParamVector theta(spec.param_count(), 0.0);
    LabeledDataset ds;
    ds.num_classes = 2;
    ds.features.push_back({0.0, 0.0});
    ds.labels.push_back(0);
    const std::vector<std::int32_t> empty;
    const std::vector<double> no_w;
    CHECK_THROWS_AS(weighted_batch_gradient(spec, theta, {&ds, empty}, no_w, 0.0), invalid_input);
    const std::vector<std::int32_t> idx{0};
    CHECK_THROWS_AS(weighted_batch_gradient(spec, theta, {&ds, idx}, no_w, 0.0), invalid_input);
}
