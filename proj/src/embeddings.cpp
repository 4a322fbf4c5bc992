#include "notecls/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "notecls/rng.hpp"

namespace notecls {

using nlohmann::json;

std::vector<std::pair<int, int>> extract_pairs(const TokenDoc& doc, const Vocabulary& vocab,
                                               int window) {
    if (window < 1) throw InvalidArgument("extract_pairs: window must be >= 1");
    std::vector<int> ids(doc.tokens.size());
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) ids[t] = vocab.find(doc.tokens[t]);

    std::vector<std::pair<int, int>> pairs;
    const int n = static_cast<int>(ids.size());
    for (int t = 0; t < n; ++t) {
        if (ids[static_cast<std::size_t>(t)] < 0) continue;
        const int lo = std::max(0, t - window);
        const int hi = std::min(n - 1, t + window);
        for (int o = lo; o <= hi; ++o) {
            if (o == t || ids[static_cast<std::size_t>(o)] < 0) continue;
            pairs.emplace_back(ids[static_cast<std::size_t>(t)], ids[static_cast<std::size_t>(o)]);
        }
    }
    return pairs;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Softmax over u_i . v_c for all i, log-sum-exp stabilized.
std::vector<double> softmax_scores(const EmbeddingTable& table, int center) {
    const auto& vc = table.v_central[static_cast<std::size_t>(center)];
    std::vector<double> p(table.u_context.size());
    double max_score = -1e300;
    for (std::size_t i = 0; i < table.u_context.size(); ++i) {
        p[i] = dot(table.u_context[i], vc);
        max_score = std::max(max_score, p[i]);
    }
    double z = 0.0;
    for (double& s : p) {
        s = std::exp(s - max_score);
        z += s;
    }
    for (double& s : p) s /= z;
    return p;
}

// Cumulative table over doc-scaled term counts^0.75, the usual noise
// distribution for negative sampling.
std::vector<double> noise_cdf(const std::vector<TokenDoc>& docs, const Vocabulary& vocab) {
    std::vector<double> weight(static_cast<std::size_t>(vocab.size()), 0.0);
    for (const TokenDoc& doc : docs)
        for (const std::string& tok : doc.tokens) {
            int idx = vocab.find(tok);
            if (idx >= 0) weight[static_cast<std::size_t>(idx)] += 1.0;
        }
    double total = 0.0;
    for (double& w : weight) {
        w = std::pow(w, 0.75);
        total += w;
    }
    double acc = 0.0;
    for (double& w : weight) {
        acc += w / total;
        w = acc;
    }
    if (!weight.empty()) weight.back() = 1.0;
    return weight;
}

int sample_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    return static_cast<int>(it - cdf.begin());
}

} // namespace

double pair_nll(const EmbeddingTable& table, int center, int context) {
    const auto& vc = table.v_central[static_cast<std::size_t>(center)];
    double max_score = -1e300;
    std::vector<double> scores(table.u_context.size());
    for (std::size_t i = 0; i < table.u_context.size(); ++i) {
        scores[i] = dot(table.u_context[i], vc);
        max_score = std::max(max_score, scores[i]);
    }
    double z = 0.0;
    for (double s : scores) z += std::exp(s - max_score);
    return -(scores[static_cast<std::size_t>(context)] - max_score - std::log(z));
}

PairGradient pair_gradient(const EmbeddingTable& table, int center, int context) {
    const auto& vc = table.v_central[static_cast<std::size_t>(center)];
    const std::size_t d = vc.size();
    std::vector<double> p = softmax_scores(table, center);

    PairGradient g;
    g.grad_v_center.assign(d, 0.0);
    g.grad_u.resize(table.u_context.size());
    for (std::size_t i = 0; i < table.u_context.size(); ++i) {
        double coeff = p[i] - (static_cast<int>(i) == context ? 1.0 : 0.0);
        g.grad_u[i].resize(d);
        for (std::size_t k = 0; k < d; ++k) {
            g.grad_u[i][k] = coeff * vc[k];
            g.grad_v_center[k] += coeff * table.u_context[i][k];
        }
    }
    return g;
}

std::vector<double> conditional_distribution(const EmbeddingTable& table, int center) {
    return softmax_scores(table, center);
}

EmbeddingTable train_skipgram(const std::vector<TokenDoc>& docs, const Vocabulary& vocab,
                              const SkipgramConfig& cfg, std::vector<double>* epoch_nll) {
    if (cfg.dim < 1) throw InvalidDimension("embedding dimension must be >= 1");
    if (cfg.epochs < 0) throw InvalidArgument("epochs must be >= 0");
    if (cfg.lr <= 0.0) throw InvalidArgument("learning rate must be > 0");
    if (cfg.mode == SkipgramMode::NegativeSampling && cfg.neg_k < 1)
        throw InvalidArgument("negative sampling needs k >= 1");
    if (vocab.size() < 2) throw InvalidArgument("vocabulary must hold at least 2 tokens");

    std::vector<std::pair<int, int>> pairs;
    for (const TokenDoc& doc : docs) {
        auto doc_pairs = extract_pairs(doc, vocab, cfg.window);
        pairs.insert(pairs.end(), doc_pairs.begin(), doc_pairs.end());
    }
    if (pairs.empty()) throw NoTrainingPairs();

    const std::size_t v = static_cast<std::size_t>(vocab.size());
    const std::size_t d = static_cast<std::size_t>(cfg.dim);

    EmbeddingTable table;
    table.vocab = vocab;
    table.dim = cfg.dim;
    table.u_context.assign(v, std::vector<double>(d, 0.0));
    table.v_central.assign(v, std::vector<double>(d));
    Rng init_rng(derive_seed(cfg.seed, {"skipgram", "init"}));
    const double half = 0.5 / static_cast<double>(d);
    for (auto& row : table.v_central)
        for (double& x : row) x = init_rng.uniform(-half, half);

    if (epoch_nll) epoch_nll->clear();
    if (cfg.epochs == 0) return table;

    std::vector<double> cdf;
    if (cfg.mode == SkipgramMode::NegativeSampling) cdf = noise_cdf(docs, vocab);

    Rng rng(derive_seed(cfg.seed, {"skipgram", "train"}));
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const double total_updates = static_cast<double>(cfg.epochs) * static_cast<double>(pairs.size());
    std::size_t update = 0;
    std::vector<double> grad_v(d);
    std::vector<int> negatives(static_cast<std::size_t>(std::max(cfg.neg_k, 1)));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t idx : order) {
            const auto [c, o] = pairs[idx];
            const double lr =
                cfg.lr * (1.0 - 0.9 * static_cast<double>(update) / total_updates);
            auto& vc = table.v_central[static_cast<std::size_t>(c)];

            if (cfg.mode == SkipgramMode::FullSoftmax) {
                // loss and softmax share one score pass
                std::vector<double> p = softmax_scores(table, c);
                loss_sum += -std::log(std::max(p[static_cast<std::size_t>(o)], 1e-300));
                std::fill(grad_v.begin(), grad_v.end(), 0.0);
                for (std::size_t i = 0; i < v; ++i) {
                    const double coeff = p[i] - (static_cast<int>(i) == o ? 1.0 : 0.0);
                    auto& ui = table.u_context[i];
                    for (std::size_t k = 0; k < d; ++k) {
                        grad_v[k] += coeff * ui[k];
                        ui[k] -= lr * coeff * vc[k];
                    }
                }
                for (std::size_t k = 0; k < d; ++k) vc[k] -= lr * grad_v[k];
            } else {
                for (int j = 0; j < cfg.neg_k; ++j) {
                    int neg = sample_cdf(cdf, rng.uniform());
                    if (neg == o) neg = static_cast<int>((neg + 1) % static_cast<int>(v));
                    negatives[static_cast<std::size_t>(j)] = neg;
                }
                std::fill(grad_v.begin(), grad_v.end(), 0.0);
                auto& uo = table.u_context[static_cast<std::size_t>(o)];
                const double so = sigmoid(dot(uo, vc));
                loss_sum += -std::log(std::max(so, 1e-300));
                const double coeff_o = so - 1.0;
                for (std::size_t k = 0; k < d; ++k) {
                    grad_v[k] += coeff_o * uo[k];
                    uo[k] -= lr * coeff_o * vc[k];
                }
                for (int j = 0; j < cfg.neg_k; ++j) {
                    auto& un = table.u_context[static_cast<std::size_t>(negatives[static_cast<std::size_t>(j)])];
                    const double sn = sigmoid(dot(un, vc));
                    loss_sum += -std::log(std::max(1.0 - sn, 1e-300));
                    for (std::size_t k = 0; k < d; ++k) {
                        grad_v[k] += sn * un[k];
                        un[k] -= lr * sn * vc[k];
                    }
                }
                for (std::size_t k = 0; k < d; ++k) vc[k] -= lr * grad_v[k];
            }
            ++update;
        }
        if (epoch_nll) epoch_nll->push_back(loss_sum / static_cast<double>(pairs.size()));
    }
    return table;
}

DenseVector doc_embed(const TokenDoc& doc, const EmbeddingTable& table) {
    DenseVector out;
    out.values.assign(static_cast<std::size_t>(table.dim), 0.0);
    int hits = 0;
    for (const std::string& tok : doc.tokens) {
        int idx = table.vocab.find(tok);
        if (idx < 0) continue;
        ++hits;
        const auto& row = table.v_central[static_cast<std::size_t>(idx)];
        for (std::size_t k = 0; k < row.size(); ++k) out.values[k] += row[k];
    }
    if (hits > 0)
        for (double& x : out.values) x /= static_cast<double>(hits);
    return out;
}

std::string embedding_artifact_to_json(const EmbeddingTable& table) {
    json j;
    j["version"] = 1;
    j["d"] = table.dim;
    j["tokens"] = table.vocab.tokens;
    j["v_central"] = table.v_central;
    j["u_context"] = table.u_context;
    return j.dump();
}

EmbeddingTable embedding_artifact_from_json(const std::string& text) {
    json j = json::parse(text);
    int version = j.at("version").get<int>();
    if (version != 1) throw VersionMismatch(1, version);
    EmbeddingTable table;
    table.dim = j.at("d").get<int>();
    table.vocab.tokens = j.at("tokens").get<std::vector<std::string>>();
    table.vocab.n_docs = 0;
    table.vocab.doc_freq.assign(table.vocab.tokens.size(), 0);
    for (int i = 0; i < table.vocab.size(); ++i)
        table.vocab.index.emplace(table.vocab.tokens[static_cast<std::size_t>(i)], i);
    table.v_central = j.at("v_central").get<std::vector<std::vector<double>>>();
    table.u_context = j.at("u_context").get<std::vector<std::vector<double>>>();
    return table;
}

} // namespace notecls
