#include "notecls/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

namespace notecls {

using nlohmann::json;

namespace {

void check_labels(std::size_t n_samples, const std::vector<int>& y, std::size_t min_samples) {
    if (n_samples != y.size()) throw LengthMismatch(n_samples, y.size());
    if (n_samples < min_samples)
        throw InvalidArgument("need at least " + std::to_string(min_samples) + " samples");
    bool has_pos = false, has_neg = false;
    for (int label : y) (label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw SingleClass();
}

std::vector<int> top_k_indices(const std::vector<double>& scores, int k) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double sa = scores[static_cast<std::size_t>(a)];
        double sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

SelectorModel make_model(const std::vector<double>& scores, int k, int input_dim) {
    if (k < 1) throw KTooSmall("k must be >= 1, got " + std::to_string(k));
    if (k > input_dim)
        throw KTooLarge("k = " + std::to_string(k) + " exceeds feature count " +
                        std::to_string(input_dim));
    SelectorModel model;
    model.scores = scores;
    model.input_dim = input_dim;
    model.kept_indices = top_k_indices(scores, k);
    return model;
}

} // namespace

std::vector<double> score_chi2(const std::vector<SparseVector>& X, const std::vector<int>& y) {
    check_labels(X.size(), y, 2);
    const int dim = X.empty() ? 0 : X.front().dim;
    std::vector<double> sum_pos(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> sum_neg(static_cast<std::size_t>(dim), 0.0);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].dim != dim) throw DimensionMismatch(static_cast<std::size_t>(dim),
                                                     static_cast<std::size_t>(X[i].dim));
        auto& acc = y[i] == 1 ? sum_pos : sum_neg;
        if (y[i] == 1) ++n_pos;
        for (const auto& [f, v] : X[i].entries) {
            if (v < 0.0) throw NegativeFeature("chi2 requires nonnegative feature values");
            acc[static_cast<std::size_t>(f)] += v;
        }
    }
    const double prior_pos = static_cast<double>(n_pos) / static_cast<double>(X.size());
    const double prior_neg = 1.0 - prior_pos;

    std::vector<double> scores(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t f = 0; f < scores.size(); ++f) {
        const double total = sum_pos[f] + sum_neg[f];
        if (total <= 0.0) continue;
        const double exp_pos = total * prior_pos;
        const double exp_neg = total * prior_neg;
        double chi2 = 0.0;
        if (exp_pos > 0.0) chi2 += (sum_pos[f] - exp_pos) * (sum_pos[f] - exp_pos) / exp_pos;
        if (exp_neg > 0.0) chi2 += (sum_neg[f] - exp_neg) * (sum_neg[f] - exp_neg) / exp_neg;
        scores[f] = chi2;
    }
    return scores;
}

std::vector<double> score_f_classif(const std::vector<DenseVector>& X, const std::vector<int>& y) {
    check_labels(X.size(), y, 3);
    const std::size_t dim = X.front().values.size();
    const std::size_t n = X.size();
    std::size_t n_pos = 0;
    std::vector<double> mean_pos(dim, 0.0), mean_neg(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (X[i].values.size() != dim) throw DimensionMismatch(dim, X[i].values.size());
        auto& acc = y[i] == 1 ? mean_pos : mean_neg;
        if (y[i] == 1) ++n_pos;
        for (std::size_t f = 0; f < dim; ++f) acc[f] += X[i].values[f];
    }
    const std::size_t n_neg = n - n_pos;
    for (std::size_t f = 0; f < dim; ++f) {
        mean_pos[f] /= static_cast<double>(n_pos);
        mean_neg[f] /= static_cast<double>(n_neg);
    }

    std::vector<double> ss_within(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& mean = y[i] == 1 ? mean_pos : mean_neg;
        for (std::size_t f = 0; f < dim; ++f) {
            const double dev = X[i].values[f] - mean[f];
            ss_within[f] += dev * dev;
        }
    }

    std::vector<double> scores(dim, 0.0);
    const double df_within = static_cast<double>(n - 2);
    for (std::size_t f = 0; f < dim; ++f) {
        const double grand =
            (mean_pos[f] * static_cast<double>(n_pos) + mean_neg[f] * static_cast<double>(n_neg)) /
            static_cast<double>(n);
        const double ss_between =
            static_cast<double>(n_pos) * (mean_pos[f] - grand) * (mean_pos[f] - grand) +
            static_cast<double>(n_neg) * (mean_neg[f] - grand) * (mean_neg[f] - grand);
        if (ss_within[f] <= 0.0) {
            scores[f] = ss_between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        } else {
            scores[f] = ss_between / (ss_within[f] / df_within);
        }
    }
    return scores;
}

std::pair<std::vector<SparseVector>, SelectorModel>
select_k_best(const std::vector<SparseVector>& X, const std::vector<double>& scores, int k) {
    const int input_dim = X.empty() ? static_cast<int>(scores.size()) : X.front().dim;
    SelectorModel model = make_model(scores, k, input_dim);
    std::vector<SparseVector> reduced;
    reduced.reserve(X.size());
    for (const auto& x : X) reduced.push_back(apply_selector(model, x));
    return {std::move(reduced), std::move(model)};
}

std::pair<std::vector<DenseVector>, SelectorModel>
select_k_best(const std::vector<DenseVector>& X, const std::vector<double>& scores, int k) {
    const int input_dim =
        X.empty() ? static_cast<int>(scores.size()) : static_cast<int>(X.front().values.size());
    SelectorModel model = make_model(scores, k, input_dim);
    std::vector<DenseVector> reduced;
    reduced.reserve(X.size());
    for (const auto& x : X) reduced.push_back(apply_selector(model, x));
    return {std::move(reduced), std::move(model)};
}

SparseVector apply_selector(const SelectorModel& model, const SparseVector& x) {
    if (x.dim != model.input_dim)
        throw DimensionMismatch(static_cast<std::size_t>(model.input_dim),
                                static_cast<std::size_t>(x.dim));
    SparseVector out;
    out.dim = model.k();
    for (const auto& [f, v] : x.entries) {
        auto it = std::lower_bound(model.kept_indices.begin(), model.kept_indices.end(), f);
        if (it != model.kept_indices.end() && *it == f)
            out.entries.emplace_back(static_cast<int>(it - model.kept_indices.begin()), v);
    }
    return out;
}

DenseVector apply_selector(const SelectorModel& model, const DenseVector& x) {
    if (x.dim() != model.input_dim)
        throw DimensionMismatch(static_cast<std::size_t>(model.input_dim),
                                static_cast<std::size_t>(x.values.size()));
    DenseVector out;
    out.values.reserve(model.kept_indices.size());
    for (int f : model.kept_indices) out.values.push_back(x.values[static_cast<std::size_t>(f)]);
    return out;
}

std::string selector_to_json(const SelectorModel& model) {
    json j;
    j["version"] = 1;
    j["input_dim"] = model.input_dim;
    j["k"] = model.k();
    j["kept_indices"] = model.kept_indices;
    // JSON has no infinity literal; the F-test sentinel is stored as a string.
    json scores = json::array();
    for (double s : model.scores) {
        if (std::isinf(s))
            scores.push_back("inf");
        else
            scores.push_back(s);
    }
    j["scores"] = std::move(scores);
    return j.dump();
}

SelectorModel selector_from_json(const std::string& text) {
    json j = json::parse(text);
    int version = j.at("version").get<int>();
    if (version != 1) throw VersionMismatch(1, version);
    SelectorModel model;
    model.input_dim = j.at("input_dim").get<int>();
    model.kept_indices = j.at("kept_indices").get<std::vector<int>>();
    for (const auto& el : j.at("scores")) {
        if (el.is_string())
            model.scores.push_back(std::numeric_limits<double>::infinity());
        else
            model.scores.push_back(el.get<double>());
    }
    return model;
}

} // namespace notecls
