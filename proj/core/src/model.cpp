#include "wola/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wola/error.hpp"
#include "wola/rng.hpp"

namespace wola {

namespace {

// Flat layout offsets. Softmax regression: [W (C x d) | b (C)].
// MLP: [W1 (h x d) | b1 (h) | W2 (C x h) | b2 (C)].
struct Layout {
    int w1 = 0, b1 = 0, w2 = 0, b2 = 0;
};

Layout layout_of(const ModelSpec& s) {
    Layout l;
    if (s.kind == ModelKind::softmax_regression) {
        l.w1 = 0;
        l.b1 = s.num_classes * s.feature_dim;
    } else {
        l.w1 = 0;
        l.b1 = s.hidden_dim * s.feature_dim;
        l.w2 = l.b1 + s.hidden_dim;
        l.b2 = l.w2 + s.num_classes * s.hidden_dim;
    }
    return l;
}

double activate(Activation a, double z) {
    return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative expressed through the activation value (relu: subgradient 0 at
// the kink).
double activate_deriv(Activation a, double z, double act) {
    return a == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - act * act;
}

struct Forward {
    Vec hidden_pre;   // mlp only
    Vec hidden_act;   // mlp only
    Vec class_scores;
};

void forward_pass(const ModelSpec& s, const ParamVector& theta, const Vec& x, Forward& f) {
    const Layout l = layout_of(s);
    f.class_scores.assign(s.num_classes, 0.0);
    if (s.kind == ModelKind::softmax_regression) {
        for (int c = 0; c < s.num_classes; ++c) {
            const double* w = theta.data() + l.w1 + c * s.feature_dim;
            double acc = theta[l.b1 + c];
            for (int j = 0; j < s.feature_dim; ++j) acc += w[j] * x[j];
            f.class_scores[c] = acc;
        }
        return;
    }
    f.hidden_pre.assign(s.hidden_dim, 0.0);
    f.hidden_act.assign(s.hidden_dim, 0.0);
    for (int k = 0; k < s.hidden_dim; ++k) {
        const double* w = theta.data() + l.w1 + k * s.feature_dim;
        double acc = theta[l.b1 + k];
        for (int j = 0; j < s.feature_dim; ++j) acc += w[j] * x[j];
        f.hidden_pre[k] = acc;
        f.hidden_act[k] = activate(s.activation, acc);
    }
    for (int c = 0; c < s.num_classes; ++c) {
        const double* w = theta.data() + l.w2 + c * s.hidden_dim;
        double acc = theta[l.b2 + c];
        for (int k = 0; k < s.hidden_dim; ++k) acc += w[k] * f.hidden_act[k];
        f.class_scores[c] = acc;
    }
}

// loss = logsumexp(scores) - scores[y]; also emits softmax probabilities.
double stable_ce(const Vec& scores, int y, Vec& probs) {
    const double m = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    probs.resize(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c) {
        probs[c] = std::exp(scores[c] - m);
        z += probs[c];
    }
    for (auto& p : probs) p /= z;
    return std::log(z) + m - scores[y];
}

void check_batch(const ModelSpec& s, const ParamVector& theta, const BatchRef& batch,
                 std::span<const double> weights) {
    if (static_cast<int>(theta.size()) != s.param_count()) {
        throw invalid_input("theta length does not match the model spec");
    }
    if (batch.size() == 0) throw invalid_input("empty batch");
    if (weights.size() != batch.size()) throw invalid_input("weights length != batch length");
    for (std::int32_t idx : batch.indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= batch.ds->size()) {
            throw invalid_input("batch index out of range");
        }
    }
}

}  // namespace

int ModelSpec::param_count() const {
    validate();
    if (kind == ModelKind::softmax_regression) {
        return num_classes * feature_dim + num_classes;
    }
    return hidden_dim * feature_dim + hidden_dim + num_classes * hidden_dim + num_classes;
}

void ModelSpec::validate() const {
    if (feature_dim < 1) throw invalid_input("ModelSpec: feature_dim must be >= 1");
    if (num_classes < 2) throw invalid_input("ModelSpec: num_classes must be >= 2");
    if (kind == ModelKind::mlp && hidden_dim < 1) {
        throw invalid_input("ModelSpec: hidden_dim must be >= 1 for mlp");
    }
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
    const Layout l = layout_of(spec);
    ParamVector theta(spec.param_count(), 0.0);
    auto fill_layer = [&](int offset, int rows, int cols, std::uint64_t layer_idx) {
        const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
        Rng rng = make_stream(seed, "init", layer_idx);
        for (int k = 0; k < rows * cols; ++k) theta[offset + k] = (2.0 * rng.uniform() - 1.0) * s;
    };
    if (spec.kind == ModelKind::softmax_regression) {
        fill_layer(l.w1, spec.num_classes, spec.feature_dim, 0);
    } else {
        fill_layer(l.w1, spec.hidden_dim, spec.feature_dim, 0);
        fill_layer(l.w2, spec.num_classes, spec.hidden_dim, 1);
    }
    return theta;
}

Vec logits(const ModelSpec& spec, const ParamVector& theta, const Vec& x) {
    if (static_cast<int>(x.size()) != spec.feature_dim) {
        throw invalid_input("feature vector has the wrong dimension");
    }
    Forward f;
    forward_pass(spec, theta, x, f);
    return f.class_scores;
}

double pointwise_loss(const ModelSpec& spec, const ParamVector& theta, const Vec& x, int y) {
    if (y < 0 || y >= spec.num_classes) throw invalid_input("label out of range");
    Vec probs;
    return stable_ce(logits(spec, theta, x), y, probs);
}

int predict(const ModelSpec& spec, const ParamVector& theta, const Vec& x) {
    const Vec scores = logits(spec, theta, x);
    int best = 0;
    for (int c = 1; c < spec.num_classes; ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

std::vector<std::int32_t> full_batch_indices(const LabeledDataset& ds) {
    std::vector<std::int32_t> idx(ds.size());
    for (std::size_t k = 0; k < ds.size(); ++k) idx[k] = static_cast<std::int32_t>(k);
    return idx;
}

double weighted_batch_loss(const ModelSpec& spec, const ParamVector& theta, BatchRef batch,
                           std::span<const double> weights, double l2_reg) {
    check_batch(spec, theta, batch, weights);
    Forward f;
    Vec probs;
    double acc = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const std::int32_t idx = batch.indices[k];
        forward_pass(spec, theta, batch.ds->features[idx], f);
        acc += weights[k] * stable_ce(f.class_scores, batch.ds->labels[idx], probs);
    }
    acc /= static_cast<double>(batch.size());
    if (l2_reg != 0.0) {
        double sq = 0.0;
        for (double t : theta) sq += t * t;
        acc += 0.5 * l2_reg * sq;
    }
    return acc;
}

ParamVector weighted_batch_gradient(const ModelSpec& spec, const ParamVector& theta,
                                    BatchRef batch, std::span<const double> weights,
                                    double l2_reg) {
    check_batch(spec, theta, batch, weights);
    const Layout l = layout_of(spec);
    ParamVector grad(theta.size(), 0.0);
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    Forward f;
    Vec probs, dz;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const std::int32_t idx = batch.indices[k];
        const Vec& x = batch.ds->features[idx];
        const int y = batch.ds->labels[idx];
        if (y < 0 || y >= spec.num_classes) throw invalid_input("label out of range");
        forward_pass(spec, theta, x, f);
        stable_ce(f.class_scores, y, probs);
        const double w = weights[k] * inv_b;
        if (w == 0.0) continue;
        // d loss / d scores = softmax - onehot(y)
        probs[y] -= 1.0;

        if (spec.kind == ModelKind::softmax_regression) {
            for (int c = 0; c < spec.num_classes; ++c) {
                const double g = w * probs[c];
                double* gw = grad.data() + l.w1 + c * spec.feature_dim;
                for (int j = 0; j < spec.feature_dim; ++j) gw[j] += g * x[j];
                grad[l.b1 + c] += g;
            }
            continue;
        }

        dz.assign(spec.hidden_dim, 0.0);
        for (int c = 0; c < spec.num_classes; ++c) {
            const double g = w * probs[c];
            const double* w2 = theta.data() + l.w2 + c * spec.hidden_dim;
            double* gw2 = grad.data() + l.w2 + c * spec.hidden_dim;
            for (int h = 0; h < spec.hidden_dim; ++h) {
                gw2[h] += g * f.hidden_act[h];
                dz[h] += g * w2[h];
            }
            grad[l.b2 + c] += g;
        }
        for (int h = 0; h < spec.hidden_dim; ++h) {
            dz[h] *= activate_deriv(spec.activation, f.hidden_pre[h], f.hidden_act[h]);
            if (dz[h] == 0.0) continue;
            double* gw1 = grad.data() + l.w1 + h * spec.feature_dim;
            for (int j = 0; j < spec.feature_dim; ++j) gw1[j] += dz[h] * x[j];
            grad[l.b1 + h] += dz[h];
        }
    }

    if (l2_reg != 0.0) axpy_inplace(grad, l2_reg, theta);
    return grad;
}

ParamVector finite_difference_gradient(const ModelSpec& spec, const ParamVector& theta,
                                       BatchRef batch, std::span<const double> weights,
                                       double l2_reg, double step) {
    if (!(step > 0.0)) throw invalid_input("finite differences need a positive step");
    ParamVector grad(theta.size(), 0.0);
    ParamVector perturbed = theta;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        perturbed[k] = theta[k] + step;
        const double up = weighted_batch_loss(spec, perturbed, batch, weights, l2_reg);
        perturbed[k] = theta[k] - step;
        const double down = weighted_batch_loss(spec, perturbed, batch, weights, l2_reg);
        perturbed[k] = theta[k];
        grad[k] = (up - down) / (2.0 * step);
    }
    return grad;
}

double min_abs_preactivation(const ModelSpec& spec, const ParamVector& theta, BatchRef batch) {
    if (spec.kind != ModelKind::mlp) return std::numeric_limits<double>::infinity();
    Forward f;
    double best = std::numeric_limits<double>::infinity();
    for (std::int32_t idx : batch.indices) {
        forward_pass(spec, theta, batch.ds->features[idx], f);
        for (double z : f.hidden_pre) best = std::min(best, std::abs(z));
    }
    return best;
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "softmax_regression") return ModelKind::softmax_regression;
    if (s == "mlp") return ModelKind::mlp;
    throw invalid_input("unknown model kind: " + s);
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh;
    throw invalid_input("unknown activation: " + s);
}

std::string to_string(ModelKind k) {
    return k == ModelKind::softmax_regression ? "softmax_regression" : "mlp";
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

}  // namespace wola
