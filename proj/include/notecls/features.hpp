#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "notecls/preprocess.hpp"
#include "notecls/vectors.hpp"

namespace notecls {

// Fitted corpus statistics shared by BoW and TF-IDF. Indices are dense,
// assigned in first-seen order so runs are deterministic.
struct Vocabulary {
    std::vector<std::string> tokens;           // index -> token
    std::unordered_map<std::string, int> index; // token -> index
    std::vector<int> doc_freq;                 // per-index document frequency
    int n_docs = 0;

    int size() const { return static_cast<int>(tokens.size()); }

    // -1 when the token is out of vocabulary.
    int find(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? -1 : it->second;
    }
};

struct IdfTable {
    std::vector<double> idf;
    int n_docs = 0;
};

// Keeps exactly the tokens with document frequency >= min_df. Throws
// EmptyVocabulary when nothing survives.
Vocabulary build_vocab(const std::vector<TokenDoc>& docs, int min_df = 1);

// Raw term counts over the vocabulary; out-of-vocabulary tokens are ignored.
SparseVector bow_vectorize(const TokenDoc& doc, const Vocabulary& vocab);

// Smoothed idf: ln((1 + n_docs) / (1 + doc_freq)) + 1, always >= 1.
IdfTable tfidf_fit(const std::vector<TokenDoc>& docs, const Vocabulary& vocab);

// Counts scaled by idf, then L2-normalized. Empty or all-OOV docs yield the
// zero vector.
SparseVector tfidf_transform(const TokenDoc& doc, const Vocabulary& vocab, const IdfTable& idf);

// Versioned JSON artifact {version, tokens, doc_freq, idf, n_docs}; idf is
// empty for plain BoW vocabularies.
std::string features_artifact_to_json(const Vocabulary& vocab, const std::optional<IdfTable>& idf);
std::pair<Vocabulary, std::optional<IdfTable>> features_artifact_from_json(const std::string& text);

} // namespace notecls
