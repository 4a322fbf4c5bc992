#include "notecls/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "notecls/rng.hpp"

namespace notecls {

using nlohmann::json;

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(sigmoid(z)) without overflow for large |z|
double log_sigmoid(double z) {
    if (z >= 0.0) return -std::log1p(std::exp(-z));
    return z - std::log1p(std::exp(z));
}

void check_binary(const std::vector<int>& y, std::size_t n) {
    if (n != y.size()) throw LengthMismatch(n, y.size());
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) throw SingleClass();
}

// ---------------------------------------------------------------- logistic

template <class X>
LrGradient lr_gradient_impl(const LRModel& model, const std::vector<X>& xs,
                            const std::vector<int>& y) {
    if (xs.size() != y.size()) throw LengthMismatch(xs.size(), y.size());
    const std::size_t n = xs.size();
    LrGradient g;
    g.grad_w.assign(model.w.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = dot(model.w, xs[i]) + model.b;
        const double p = sigmoid(z);
        // BCE in the numerically safe log-sigmoid form
        g.loss += y[i] == 1 ? -log_sigmoid(z) : -log_sigmoid(-z);
        const double residual = (p - static_cast<double>(y[i])) * inv_n;
        add_scaled(g.grad_w, residual, xs[i]);
        g.grad_b += residual;
    }
    g.loss *= inv_n;
    for (std::size_t k = 0; k < model.w.size(); ++k) {
        g.loss += 0.5 * model.l2 * model.w[k] * model.w[k];
        g.grad_w[k] += model.l2 * model.w[k];
    }
    return g;
}

template <class X>
LRModel lr_fit_impl(const std::vector<X>& xs, const std::vector<int>& y, const LrConfig& cfg) {
    check_binary(y, xs.size());
    if (xs.size() < 2) throw InvalidArgument("need at least 2 samples");
    if (cfg.lr <= 0.0) throw InvalidArgument("learning rate must be > 0");
    if (cfg.l2 < 0.0) throw InvalidArgument("l2 must be >= 0");

    LRModel model;
    model.w.assign(static_cast<std::size_t>(dim_of(xs.front())), 0.0);
    model.l2 = cfg.l2;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        LrGradient g = lr_gradient_impl(model, xs, y);
        for (std::size_t k = 0; k < model.w.size(); ++k) model.w[k] -= cfg.lr * g.grad_w[k];
        model.b -= cfg.lr * g.grad_b;
    }
    return model;
}

// -------------------------------------------------------------- Gaussian NB

struct ClassStats {
    std::size_t count = 0;
    std::vector<double> sum, sum_sq;
};

template <class X>
GNBModel gnb_fit_impl(const std::vector<X>& xs, const std::vector<int>& y, double var_smoothing) {
    check_binary(y, xs.size());
    if (var_smoothing <= 0.0) throw InvalidArgument("var_smoothing must be > 0");
    const std::size_t dim = static_cast<std::size_t>(dim_of(xs.front()));

    ClassStats stats[2];
    std::vector<double> total_sum(dim, 0.0), total_sq(dim, 0.0);
    for (int c = 0; c < 2; ++c) {
        stats[c].sum.assign(dim, 0.0);
        stats[c].sum_sq.assign(dim, 0.0);
    }
    std::vector<double> sq_buf(dim);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (static_cast<std::size_t>(dim_of(xs[i])) != dim)
            throw DimensionMismatch(dim, static_cast<std::size_t>(dim_of(xs[i])));
        ClassStats& s = stats[y[i]];
        ++s.count;
        add_scaled(s.sum, 1.0, xs[i]);
        add_scaled(total_sum, 1.0, xs[i]);
        // squares accumulated via a one-sample squared copy
        std::fill(sq_buf.begin(), sq_buf.end(), 0.0);
        add_scaled(sq_buf, 1.0, xs[i]);
        for (std::size_t f = 0; f < dim; ++f) {
            const double v2 = sq_buf[f] * sq_buf[f];
            s.sum_sq[f] += v2;
            total_sq[f] += v2;
        }
    }

    // smoothing floor: var_smoothing * largest total feature variance
    const double n = static_cast<double>(xs.size());
    double max_total_var = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
        const double mean = total_sum[f] / n;
        max_total_var = std::max(max_total_var, total_sq[f] / n - mean * mean);
    }
    double epsilon = var_smoothing * max_total_var;
    if (epsilon <= 0.0) epsilon = var_smoothing;

    GNBModel model;
    model.prior_pos = static_cast<double>(stats[1].count) / n;
    model.prior_neg = static_cast<double>(stats[0].count) / n;
    model.mu_pos.resize(dim);
    model.mu_neg.resize(dim);
    model.var_pos.resize(dim);
    model.var_neg.resize(dim);
    for (std::size_t f = 0; f < dim; ++f) {
        const double np = static_cast<double>(stats[1].count);
        const double nn = static_cast<double>(stats[0].count);
        model.mu_pos[f] = stats[1].sum[f] / np;
        model.mu_neg[f] = stats[0].sum[f] / nn;
        model.var_pos[f] = std::max(stats[1].sum_sq[f] / np - model.mu_pos[f] * model.mu_pos[f], 0.0) + epsilon;
        model.var_neg[f] = std::max(stats[0].sum_sq[f] / nn - model.mu_neg[f] * model.mu_neg[f], 0.0) + epsilon;
    }
    return model;
}

constexpr double kTwoPi = 6.283185307179586;

double gnb_log_joint(const GNBModel& model, const std::vector<double>& x, bool positive) {
    const auto& mu = positive ? model.mu_pos : model.mu_neg;
    const auto& var = positive ? model.var_pos : model.var_neg;
    double lj = std::log(positive ? model.prior_pos : model.prior_neg);
    for (std::size_t f = 0; f < x.size(); ++f) {
        const double dev = x[f] - mu[f];
        lj += -0.5 * std::log(kTwoPi * var[f]) - dev * dev / (2.0 * var[f]);
    }
    return lj;
}

template <class X>
double gnb_proba_impl(const GNBModel& model, const X& x) {
    if (static_cast<std::size_t>(dim_of(x)) != model.mu_pos.size())
        throw DimensionMismatch(model.mu_pos.size(), static_cast<std::size_t>(dim_of(x)));
    std::vector<double> dense(model.mu_pos.size(), 0.0);
    add_scaled(dense, 1.0, x);
    const double lj_pos = gnb_log_joint(model, dense, true);
    const double lj_neg = gnb_log_joint(model, dense, false);
    const double m = std::max(lj_pos, lj_neg);
    const double zp = std::exp(lj_pos - m);
    const double zn = std::exp(lj_neg - m);
    return zp / (zp + zn);
}

// --------------------------------------------------------------------- MLP

void mlp_input_accumulate(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                          const SparseVector& x, std::vector<double>& out);
void mlp_input_accumulate(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                          const DenseVector& x, std::vector<double>& out);

struct ForwardPass {
    // activations[0] is unused for sparse inputs; hidden activations and the
    // output probability are enough for backprop when the input is kept
    // separately.
    std::vector<std::vector<double>> pre;  // pre-activations per layer
    std::vector<std::vector<double>> act;  // post-activation per hidden layer
    double proba = 0.0;
};

template <class X>
ForwardPass mlp_forward(const MLPModel& model, const X& x) {
    const std::size_t n_layers = model.weights.size();
    ForwardPass fp;
    fp.pre.resize(n_layers);
    fp.act.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t rows = static_cast<std::size_t>(model.layer_sizes[l + 1]);
        const std::size_t cols = static_cast<std::size_t>(model.layer_sizes[l]);
        fp.pre[l].assign(model.biases[l].begin(), model.biases[l].end());
        if (l == 0) {
            // sparse-aware first layer: accumulate columns present in x
            mlp_input_accumulate(model.weights[0], rows, cols, x, fp.pre[0]);
        } else {
            const auto& w = model.weights[l];
            const auto& prev = fp.act[l - 1];
            for (std::size_t r = 0; r < rows; ++r) {
                double s = 0.0;
                const double* wr = &w[r * cols];
                for (std::size_t c = 0; c < cols; ++c) s += wr[c] * prev[c];
                fp.pre[l][r] += s;
            }
        }
        if (l + 1 < n_layers) {
            fp.act[l].resize(rows);
            for (std::size_t r = 0; r < rows; ++r) fp.act[l][r] = std::max(fp.pre[l][r], 0.0);
        }
    }
    fp.proba = sigmoid(fp.pre.back()[0]);
    return fp;
}

void mlp_input_accumulate(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                          const SparseVector& x, std::vector<double>& out) {
    if (static_cast<std::size_t>(x.dim) != cols) throw DimensionMismatch(cols, static_cast<std::size_t>(x.dim));
    for (const auto& [c, v] : x.entries)
        for (std::size_t r = 0; r < rows; ++r) out[r] += w[r * cols + static_cast<std::size_t>(c)] * v;
}

void mlp_input_accumulate(const std::vector<double>& w, std::size_t rows, std::size_t cols,
                          const DenseVector& x, std::vector<double>& out) {
    if (x.values.size() != cols) throw DimensionMismatch(cols, x.values.size());
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        const double* wr = &w[r * cols];
        for (std::size_t c = 0; c < cols; ++c) s += wr[c] * x.values[c];
        out[r] += s;
    }
}

void mlp_input_outer(std::vector<double>& grad_w, std::size_t cols, const SparseVector& x,
                     const std::vector<double>& delta) {
    for (std::size_t r = 0; r < delta.size(); ++r)
        for (const auto& [c, v] : x.entries)
            grad_w[r * cols + static_cast<std::size_t>(c)] += delta[r] * v;
}

void mlp_input_outer(std::vector<double>& grad_w, std::size_t cols, const DenseVector& x,
                     const std::vector<double>& delta) {
    for (std::size_t r = 0; r < delta.size(); ++r) {
        double* gr = &grad_w[r * cols];
        for (std::size_t c = 0; c < cols; ++c) gr[c] += delta[r] * x.values[c];
    }
}

template <class X>
MlpGradient mlp_gradient_impl(const MLPModel& model, const std::vector<X>& xs,
                              const std::vector<int>& y) {
    if (xs.size() != y.size()) throw LengthMismatch(xs.size(), y.size());
    const std::size_t n_layers = model.weights.size();
    MlpGradient g;
    g.grad_w.resize(n_layers);
    g.grad_b.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        g.grad_w[l].assign(model.weights[l].size(), 0.0);
        g.grad_b[l].assign(model.biases[l].size(), 0.0);
    }
    const double inv_n = 1.0 / static_cast<double>(xs.size());

    for (std::size_t i = 0; i < xs.size(); ++i) {
        ForwardPass fp = mlp_forward(model, xs[i]);
        const double z_out = fp.pre.back()[0];
        g.loss += (y[i] == 1 ? -log_sigmoid(z_out) : -log_sigmoid(-z_out)) * inv_n;

        // delta at the output, then backward through ReLU layers
        std::vector<double> delta = {(fp.proba - static_cast<double>(y[i])) * inv_n};
        for (std::size_t l = n_layers; l-- > 0;) {
            const std::size_t rows = static_cast<std::size_t>(model.layer_sizes[l + 1]);
            const std::size_t cols = static_cast<std::size_t>(model.layer_sizes[l]);
            for (std::size_t r = 0; r < rows; ++r) g.grad_b[l][r] += delta[r];
            if (l == 0) {
                mlp_input_outer(g.grad_w[0], cols, xs[i], delta);
            } else {
                const auto& prev = fp.act[l - 1];
                for (std::size_t r = 0; r < rows; ++r) {
                    double* gr = &g.grad_w[l][r * cols];
                    for (std::size_t c = 0; c < cols; ++c) gr[c] += delta[r] * prev[c];
                }
            }
            if (l == 0) break;
            // propagate: delta_prev = W^T delta, masked by ReLU'
            std::vector<double> delta_prev(cols, 0.0);
            const auto& w = model.weights[l];
            for (std::size_t r = 0; r < rows; ++r) {
                const double* wr = &w[r * cols];
                for (std::size_t c = 0; c < cols; ++c) delta_prev[c] += wr[c] * delta[r];
            }
            for (std::size_t c = 0; c < cols; ++c)
                if (fp.pre[l - 1][c] <= 0.0) delta_prev[c] = 0.0;
            delta = std::move(delta_prev);
        }
    }
    return g;
}

template <class X>
MLPModel mlp_fit_impl(const std::vector<X>& xs, const std::vector<int>& y, const MlpConfig& cfg) {
    check_binary(y, xs.size());
    if (cfg.lr <= 0.0) throw InvalidArgument("learning rate must be > 0");
    if (cfg.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    for (int h : cfg.hidden)
        if (h < 1) throw InvalidArchitecture("hidden layer sizes must be >= 1");
    if (cfg.hidden.empty())
        throw InvalidArchitecture("need at least one hidden layer");

    MLPModel model = mlp_init(dim_of(xs.front()), cfg.hidden, cfg.seed);
    Rng rng(derive_seed(cfg.seed, {"mlp", "schedule"}));
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<X> batch_x;
    std::vector<int> batch_y;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            batch_x.clear();
            batch_y.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch_x.push_back(xs[order[i]]);
                batch_y.push_back(y[order[i]]);
            }
            MlpGradient g = mlp_gradient_impl(model, batch_x, batch_y);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t k = 0; k < model.weights[l].size(); ++k)
                    model.weights[l][k] -= cfg.lr * g.grad_w[l][k];
                for (std::size_t k = 0; k < model.biases[l].size(); ++k)
                    model.biases[l][k] -= cfg.lr * g.grad_b[l][k];
            }
        }
    }
    return model;
}

} // namespace

// ---------------------------------------------------------------- logistic

LrGradient lr_loss_gradient(const LRModel& model, const std::vector<SparseVector>& X,
                            const std::vector<int>& y) {
    return lr_gradient_impl(model, X, y);
}
LrGradient lr_loss_gradient(const LRModel& model, const std::vector<DenseVector>& X,
                            const std::vector<int>& y) {
    return lr_gradient_impl(model, X, y);
}

LRModel lr_fit(const std::vector<SparseVector>& X, const std::vector<int>& y, const LrConfig& cfg) {
    return lr_fit_impl(X, y, cfg);
}
LRModel lr_fit(const std::vector<DenseVector>& X, const std::vector<int>& y, const LrConfig& cfg) {
    return lr_fit_impl(X, y, cfg);
}

double lr_predict_proba(const LRModel& model, const SparseVector& x) {
    return sigmoid(dot(model.w, x) + model.b);
}
double lr_predict_proba(const LRModel& model, const DenseVector& x) {
    return sigmoid(dot(model.w, x) + model.b);
}

// -------------------------------------------------------------- Gaussian NB

GNBModel gnb_fit(const std::vector<SparseVector>& X, const std::vector<int>& y,
                 double var_smoothing) {
    return gnb_fit_impl(X, y, var_smoothing);
}
GNBModel gnb_fit(const std::vector<DenseVector>& X, const std::vector<int>& y,
                 double var_smoothing) {
    return gnb_fit_impl(X, y, var_smoothing);
}

double gnb_predict_proba(const GNBModel& model, const SparseVector& x) {
    return gnb_proba_impl(model, x);
}
double gnb_predict_proba(const GNBModel& model, const DenseVector& x) {
    return gnb_proba_impl(model, x);
}

// --------------------------------------------------------------------- MLP

MLPModel mlp_init(int input_dim, const std::vector<int>& hidden, std::uint64_t seed) {
    if (input_dim < 1) throw InvalidArchitecture("input dimension must be >= 1");
    MLPModel model;
    model.layer_sizes.push_back(input_dim);
    for (int h : hidden) model.layer_sizes.push_back(h);
    model.layer_sizes.push_back(1);

    Rng rng(derive_seed(seed, {"mlp", "init"}));
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        const std::size_t fan_in = static_cast<std::size_t>(model.layer_sizes[l]);
        const std::size_t fan_out = static_cast<std::size_t>(model.layer_sizes[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> w(fan_in * fan_out);
        for (double& x : w) x = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

MlpGradient mlp_loss_gradient(const MLPModel& model, const std::vector<SparseVector>& X,
                              const std::vector<int>& y) {
    return mlp_gradient_impl(model, X, y);
}
MlpGradient mlp_loss_gradient(const MLPModel& model, const std::vector<DenseVector>& X,
                              const std::vector<int>& y) {
    return mlp_gradient_impl(model, X, y);
}

MLPModel mlp_fit(const std::vector<SparseVector>& X, const std::vector<int>& y,
                 const MlpConfig& cfg) {
    return mlp_fit_impl(X, y, cfg);
}
MLPModel mlp_fit(const std::vector<DenseVector>& X, const std::vector<int>& y,
                 const MlpConfig& cfg) {
    return mlp_fit_impl(X, y, cfg);
}

double mlp_predict_proba(const MLPModel& model, const SparseVector& x) {
    return mlp_forward(model, x).proba;
}
double mlp_predict_proba(const MLPModel& model, const DenseVector& x) {
    return mlp_forward(model, x).proba;
}

// ---------------------------------------------------------- serialization

std::string lr_to_json(const LRModel& model) {
    json j;
    j["version"] = 1;
    j["model_type"] = "lr";
    j["w"] = model.w;
    j["b"] = model.b;
    j["l2"] = model.l2;
    return j.dump();
}

std::string gnb_to_json(const GNBModel& model) {
    json j;
    j["version"] = 1;
    j["model_type"] = "gnb";
    j["prior_pos"] = model.prior_pos;
    j["prior_neg"] = model.prior_neg;
    j["mu_pos"] = model.mu_pos;
    j["mu_neg"] = model.mu_neg;
    j["var_pos"] = model.var_pos;
    j["var_neg"] = model.var_neg;
    return j.dump();
}

std::string mlp_to_json(const MLPModel& model) {
    json j;
    j["version"] = 1;
    j["model_type"] = "mlp";
    j["layer_sizes"] = model.layer_sizes;
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    return j.dump();
}

namespace {
json parse_model_json(const std::string& text, const char* expected_type) {
    json j = json::parse(text);
    int version = j.at("version").get<int>();
    if (version != 1) throw VersionMismatch(1, version);
    if (j.at("model_type").get<std::string>() != expected_type)
        throw InvalidArgument(std::string("expected model_type ") + expected_type);
    return j;
}
} // namespace

LRModel lr_from_json(const std::string& text) {
    json j = parse_model_json(text, "lr");
    LRModel model;
    model.w = j.at("w").get<std::vector<double>>();
    model.b = j.at("b").get<double>();
    model.l2 = j.at("l2").get<double>();
    return model;
}

GNBModel gnb_from_json(const std::string& text) {
    json j = parse_model_json(text, "gnb");
    GNBModel model;
    model.prior_pos = j.at("prior_pos").get<double>();
    model.prior_neg = j.at("prior_neg").get<double>();
    model.mu_pos = j.at("mu_pos").get<std::vector<double>>();
    model.mu_neg = j.at("mu_neg").get<std::vector<double>>();
    model.var_pos = j.at("var_pos").get<std::vector<double>>();
    model.var_neg = j.at("var_neg").get<std::vector<double>>();
    return model;
}

MLPModel mlp_from_json(const std::string& text) {
    json j = parse_model_json(text, "mlp");
    MLPModel model;
    model.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    return model;
}

} // namespace notecls
