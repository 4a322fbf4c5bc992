#include "notecls/features.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include <json.hpp>

namespace notecls {

using nlohmann::json;

Vocabulary build_vocab(const std::vector<TokenDoc>& docs, int min_df) {
    if (docs.empty()) throw InvalidArgument("build_vocab: docs must be non-empty");
    if (min_df < 1) throw InvalidArgument("build_vocab: min_df must be >= 1");

    // First-seen order over all docs, then document frequencies.
    std::vector<std::string> order;
    std::unordered_map<std::string, int> df;
    for (const TokenDoc& doc : docs) {
        std::unordered_set<std::string> seen;
        for (const std::string& tok : doc.tokens) {
            auto [it, inserted] = df.try_emplace(tok, 0);
            if (inserted) order.push_back(tok);
            if (seen.insert(tok).second) ++it->second;
        }
    }

    Vocabulary vocab;
    vocab.n_docs = static_cast<int>(docs.size());
    for (const std::string& tok : order) {
        int freq = df[tok];
        if (freq < min_df) continue;
        vocab.index.emplace(tok, vocab.size());
        vocab.tokens.push_back(tok);
        vocab.doc_freq.push_back(freq);
    }
    if (vocab.tokens.empty()) throw EmptyVocabulary();
    return vocab;
}

SparseVector bow_vectorize(const TokenDoc& doc, const Vocabulary& vocab) {
    std::map<int, double> counts;
    for (const std::string& tok : doc.tokens) {
        int idx = vocab.find(tok);
        if (idx >= 0) counts[idx] += 1.0;
    }
    SparseVector vec;
    vec.dim = vocab.size();
    vec.entries.assign(counts.begin(), counts.end());
    return vec;
}

IdfTable tfidf_fit(const std::vector<TokenDoc>& docs, const Vocabulary& vocab) {
    (void)docs; // document frequencies already live in the vocabulary
    IdfTable table;
    table.n_docs = vocab.n_docs;
    table.idf.reserve(vocab.doc_freq.size());
    for (int df : vocab.doc_freq)
        table.idf.push_back(std::log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0);
    return table;
}

SparseVector tfidf_transform(const TokenDoc& doc, const Vocabulary& vocab, const IdfTable& idf) {
    SparseVector vec = bow_vectorize(doc, vocab);
    for (auto& [i, v] : vec.entries) v *= idf.idf[static_cast<std::size_t>(i)];
    double norm = vec.l2_norm();
    if (norm > 0.0)
        for (auto& [i, v] : vec.entries) v /= norm;
    return vec;
}

std::string features_artifact_to_json(const Vocabulary& vocab, const std::optional<IdfTable>& idf) {
    json j;
    j["version"] = 1;
    j["tokens"] = vocab.tokens;
    j["doc_freq"] = vocab.doc_freq;
    j["idf"] = idf ? idf->idf : std::vector<double>{};
    j["n_docs"] = vocab.n_docs;
    return j.dump();
}

std::pair<Vocabulary, std::optional<IdfTable>> features_artifact_from_json(const std::string& text) {
    json j = json::parse(text);
    int version = j.at("version").get<int>();
    if (version != 1) throw VersionMismatch(1, version);
    Vocabulary vocab;
    vocab.tokens = j.at("tokens").get<std::vector<std::string>>();
    vocab.doc_freq = j.at("doc_freq").get<std::vector<int>>();
    vocab.n_docs = j.at("n_docs").get<int>();
    for (int i = 0; i < vocab.size(); ++i) vocab.index.emplace(vocab.tokens[static_cast<std::size_t>(i)], i);
    std::optional<IdfTable> idf;
    auto idf_values = j.at("idf").get<std::vector<double>>();
    if (!idf_values.empty()) idf = IdfTable{std::move(idf_values), vocab.n_docs};
    return {std::move(vocab), std::move(idf)};
}

} // namespace notecls
