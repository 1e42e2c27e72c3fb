#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "wola/dataset.hpp"
#include "wola/vector_ops.hpp"

namespace wola {

enum class ModelKind { softmax_regression, mlp };
enum class Activation { relu, tanh };

/// Architecture of a small differentiable classifier. Parameters are handled
/// as one flat vector; the layout is (row-major weights, then biases) per
/// layer, layers in forward order.
struct ModelSpec {
    ModelKind kind = ModelKind::softmax_regression;
    int feature_dim = 1;
    int num_classes = 2;
    int hidden_dim = 16;                    // mlp only
    Activation activation = Activation::relu;  // mlp only

    int param_count() const;
    void validate() const;
};

/// Flattened model parameters (length spec.param_count()).
using ParamVector = Vec;

/// Glorot-uniform weights, zero biases, deterministic per seed.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

/// Class scores before softmax.
Vec logits(const ModelSpec& spec, const ParamVector& theta, const Vec& x);

/// Cross-entropy of the prediction at x against label y, computed with the
/// usual max-subtraction stabilisation.
double pointwise_loss(const ModelSpec& spec, const ParamVector& theta, const Vec& x, int y);

/// argmax class; ties go to the smallest index.
int predict(const ModelSpec& spec, const ParamVector& theta, const Vec& x);

/// A view into a dataset: the samples of `ds` selected by `indices` (all of
/// ds when indices is empty is NOT implied; pass the identity explicitly).
struct BatchRef {
    const LabeledDataset* ds;
    std::span<const std::int32_t> indices;

    std::size_t size() const { return indices.size(); }
};

/// All-samples index list for a dataset.
std::vector<std::int32_t> full_batch_indices(const LabeledDataset& ds);

/// (1/B) sum_k w_k * loss_k + (l2_reg/2)*||theta||^2
double weighted_batch_loss(const ModelSpec& spec, const ParamVector& theta, BatchRef batch,
                           std::span<const double> weights, double l2_reg);

/// Exact gradient of weighted_batch_loss:
/// (1/B) sum_k w_k * grad loss_k + l2_reg * theta.
ParamVector weighted_batch_gradient(const ModelSpec& spec, const ParamVector& theta,
                                    BatchRef batch, std::span<const double> weights,
                                    double l2_reg);

/// Central finite differences of weighted_batch_loss, coordinate by
/// coordinate. Used as the independent check of the analytic gradient.
ParamVector finite_difference_gradient(const ModelSpec& spec, const ParamVector& theta,
                                       BatchRef batch, std::span<const double> weights,
                                       double l2_reg, double step);

/// Smallest |pre-activation| over the batch for an mlp; relu gradient checks
/// reject instances where this sits near the kink. Returns +inf for smooth
/// models.
double min_abs_preactivation(const ModelSpec& spec, const ParamVector& theta, BatchRef batch);

ModelKind model_kind_from_string(const std::string& s);
Activation activation_from_string(const std::string& s);
std::string to_string(ModelKind k);
std::string to_string(Activation a);

}  // namespace wola
