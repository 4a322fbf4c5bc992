#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "notecls/features.hpp"
#include "notecls/vectors.hpp"

namespace notecls {

// Skip-gram parameters: one central vector and one context vector per
// vocabulary word.
struct EmbeddingTable {
    Vocabulary vocab;
    int dim = 0;
    std::vector<std::vector<double>> v_central; // |vocab| x dim
    std::vector<std::vector<double>> u_context; // |vocab| x dim
};

enum class SkipgramMode { FullSoftmax, NegativeSampling };

struct SkipgramConfig {
    int dim = 100;
    int window = 5;
    int epochs = 5;
    double lr = 0.025; // decays linearly to lr/10 over all updates
    std::uint64_t seed = 1;
    SkipgramMode mode = SkipgramMode::NegativeSampling;
    int neg_k = 5;
};

// (center_index, context_index) pairs for one document: every in-vocabulary
// position pairs with each in-vocabulary position within `window`, itself
// excluded. Out-of-vocabulary tokens are skipped but still occupy positions.
std::vector<std::pair<int, int>> extract_pairs(const TokenDoc& doc, const Vocabulary& vocab,
                                               int window);

// Stochastic gradient ascent on the skip-gram log-conditional likelihood
//   log P(o|c) = u_o . v_c - log sum_i exp(u_i . v_c)
// over all pairs, for the configured number of epochs. Serial and
// deterministic for a fixed seed. When epoch_nll is non-null it receives the
// mean per-pair negative log-likelihood of each epoch, measured online.
EmbeddingTable train_skipgram(const std::vector<TokenDoc>& docs, const Vocabulary& vocab,
                              const SkipgramConfig& cfg,
                              std::vector<double>* epoch_nll = nullptr);

// Exact full-softmax NLL of one (center, context) pair under the table.
double pair_nll(const EmbeddingTable& table, int center, int context);

// Analytic full-softmax gradient of pair_nll with respect to v_central[center]
// and every row of u_context. Exactly the update direction the trainer uses.
struct PairGradient {
    std::vector<double> grad_v_center;          // d(nll)/d v_c
    std::vector<std::vector<double>> grad_u;    // d(nll)/d u_i, all rows
};
PairGradient pair_gradient(const EmbeddingTable& table, int center, int context);

// Softmax distribution P(. | center) implied by the table; sums to 1.
std::vector<double> conditional_distribution(const EmbeddingTable& table, int center);

// Componentwise mean of the central vectors of in-vocabulary tokens, counted
// with multiplicity; zero vector when nothing is in vocabulary.
DenseVector doc_embed(const TokenDoc& doc, const EmbeddingTable& table);

// Versioned JSON artifact {version, d, tokens, v_central, u_context}.
std::string embedding_artifact_to_json(const EmbeddingTable& table);
EmbeddingTable embedding_artifact_from_json(const std::string& text);

} // namespace notecls
