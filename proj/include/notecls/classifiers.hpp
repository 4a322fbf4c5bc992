#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notecls/vectors.hpp"

namespace notecls {

// Binary labels at the ML layer are ints: 1 = Positive, 0 = Negative.

// ---------------------------------------------------------------- logistic

struct LRModel {
    std::vector<double> w;
    double b = 0.0;
    double l2 = 0.0;
};

struct LrConfig {
    double l2 = 1e-4;
    double lr = 0.1;
    int epochs = 300;
    std::uint64_t seed = 1;
};

struct LrGradient {
    std::vector<double> grad_w;
    double grad_b = 0.0;
    double loss = 0.0; // regularized mean negative log-likelihood
};

// Full-batch gradient of the regularized mean NLL at the model's current
// parameters. The trainer takes exactly these steps, so finite differences
// on `loss` check the training gradient.
LrGradient lr_loss_gradient(const LRModel& model, const std::vector<SparseVector>& X,
                            const std::vector<int>& y);
LrGradient lr_loss_gradient(const LRModel& model, const std::vector<DenseVector>& X,
                            const std::vector<int>& y);

LRModel lr_fit(const std::vector<SparseVector>& X, const std::vector<int>& y,
               const LrConfig& cfg = {});
LRModel lr_fit(const std::vector<DenseVector>& X, const std::vector<int>& y,
               const LrConfig& cfg = {});

// 1 / (1 + exp(-(w.x + b)))
double lr_predict_proba(const LRModel& model, const SparseVector& x);
double lr_predict_proba(const LRModel& model, const DenseVector& x);

// -------------------------------------------------------------- Gaussian NB

struct GNBModel {
    double prior_pos = 0.5;
    double prior_neg = 0.5;
    std::vector<double> mu_pos, mu_neg;   // per-feature class means
    std::vector<double> var_pos, var_neg; // per-feature class variances, smoothed
};

// Priors are class frequencies; means and variances use the population
// convention (divisor n). Every variance gets var_smoothing * max total
// feature variance added, keeping densities finite on constant features.
GNBModel gnb_fit(const std::vector<SparseVector>& X, const std::vector<int>& y,
                 double var_smoothing = 1e-9);
GNBModel gnb_fit(const std::vector<DenseVector>& X, const std::vector<int>& y,
                 double var_smoothing = 1e-9);

// Posterior of the positive class, computed fully in log space so feature
// values within +-1e6 never overflow.
double gnb_predict_proba(const GNBModel& model, const SparseVector& x);
double gnb_predict_proba(const GNBModel& model, const DenseVector& x);

// --------------------------------------------------------------------- MLP

// Feedforward net: ReLU hidden layers, sigmoid output, trained with
// mini-batch SGD on mean binary cross-entropy.
struct MLPModel {
    std::vector<int> layer_sizes;              // [in, hidden..., 1]
    std::vector<std::vector<double>> weights;  // weights[l]: sizes[l+1] x sizes[l], row-major
    std::vector<std::vector<double>> biases;   // biases[l]: sizes[l+1]
};

struct MlpConfig {
    std::vector<int> hidden = {100};
    double lr = 1e-3;
    int epochs = 200;
    int batch_size = 32;
    std::uint64_t seed = 1;
};

struct MlpGradient {
    std::vector<std::vector<double>> grad_w;
    std::vector<std::vector<double>> grad_b;
    double loss = 0.0; // mean binary cross-entropy over the batch
};

MlpGradient mlp_loss_gradient(const MLPModel& model, const std::vector<SparseVector>& X,
                              const std::vector<int>& y);
MlpGradient mlp_loss_gradient(const MLPModel& model, const std::vector<DenseVector>& X,
                              const std::vector<int>& y);

// Glorot-uniform weight init (biases zero), seeded and deterministic.
MLPModel mlp_init(int input_dim, const std::vector<int>& hidden, std::uint64_t seed);

MLPModel mlp_fit(const std::vector<SparseVector>& X, const std::vector<int>& y,
                 const MlpConfig& cfg = {});
MLPModel mlp_fit(const std::vector<DenseVector>& X, const std::vector<int>& y,
                 const MlpConfig& cfg = {});

double mlp_predict_proba(const MLPModel& model, const SparseVector& x);
double mlp_predict_proba(const MLPModel& model, const DenseVector& x);

// ------------------------------------------------------------------ shared

// Positive iff probability >= threshold.
inline int predict_label(double proba, double threshold = 0.5) {
    return proba >= threshold ? 1 : 0;
}

template <class X>
int predict(const LRModel& model, const X& x, double threshold = 0.5) {
    return predict_label(lr_predict_proba(model, x), threshold);
}
template <class X>
int predict(const GNBModel& model, const X& x, double threshold = 0.5) {
    return predict_label(gnb_predict_proba(model, x), threshold);
}
template <class X>
int predict(const MLPModel& model, const X& x, double threshold = 0.5) {
    return predict_label(mlp_predict_proba(model, x), threshold);
}

// Versioned JSON with a model_type discriminator ("lr", "gnb", "mlp").
std::string lr_to_json(const LRModel& model);
std::string gnb_to_json(const GNBModel& model);
std::string mlp_to_json(const MLPModel& model);
LRModel lr_from_json(const std::string& text);
GNBModel gnb_from_json(const std::string& text);
MLPModel mlp_from_json(const std::string& text);

} // namespace notecls
