#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "notecls/features.hpp"
#include "notecls/rng.hpp"

using namespace notecls;

namespace {

TokenDoc doc_of(std::vector<std::string> tokens) {
    TokenDoc d;
    d.note_id = "t";
    d.tokens = std::move(tokens);
    return d;
}

// Brute-force TF-IDF oracle, independent of the library path: string-keyed
// maps, naive document-frequency counting, explicit normalization.
std::vector<std::map<std::string, double>> oracle_tfidf(
    const std::vector<std::vector<std::string>>& docs) {
    std::map<std::string, int> df;
    for (const auto& doc : docs) {
        std::set<std::string> uniq(doc.begin(), doc.end());
        for (const auto& t : uniq) df[t] += 1;
    }
    const double n = static_cast<double>(docs.size());
    std::vector<std::map<std::string, double>> result;
    for (const auto& doc : docs) {
        std::map<std::string, double> weights;
        for (const auto& t : doc) weights[t] += 1.0;
        double norm_sq = 0.0;
        for (auto& [t, w] : weights) {
            w *= std::log((1.0 + n) / (1.0 + df[t])) + 1.0;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0)
            for (auto& [t, w] : weights) w /= std::sqrt(norm_sq);
        result.push_back(std::move(weights));
    }
    return result;
}

} // namespace

TEST_CASE("build_vocab counts document frequencies") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b"}), doc_of({"a"})};
    Vocabulary v = build_vocab(docs, 1);
    REQUIRE(v.size() == 2);
    CHECK(v.find("a") == 0);
    CHECK(v.find("b") == 1);
    CHECK(v.doc_freq == std::vector<int>{2, 1});
    CHECK(v.n_docs == 2);

    Vocabulary v2 = build_vocab(docs, 2);
    REQUIRE(v2.size() == 1);
    CHECK(v2.find("a") == 0);
    CHECK(v2.find("b") == -1);

    std::vector<TokenDoc> empty_docs = {doc_of({}), doc_of({})};
    CHECK_THROWS_AS(build_vocab(empty_docs, 1), EmptyVocabulary);
}

TEST_CASE("bow_vectorize counts in-vocabulary tokens") {
    std::vector<TokenDoc> fitdocs = {doc_of({"a", "b", "c"})};
    Vocabulary v = build_vocab(fitdocs, 1);

    SparseVector x = bow_vectorize(doc_of({"a", "b", "a"}), v);
    CHECK(x.dim == 3);
    REQUIRE(x.entries.size() == 2);
    CHECK(x.entries[0] == std::pair<int, double>{0, 2.0});
    CHECK(x.entries[1] == std::pair<int, double>{1, 1.0});

    CHECK(bow_vectorize(doc_of({"z"}), v).entries.empty());
    CHECK(bow_vectorize(doc_of({}), v).entries.empty());
}

TEST_CASE("tfidf_fit uses the smoothed formula") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b"}), doc_of({"a"})};
    Vocabulary v = build_vocab(docs, 1);
    IdfTable idf = tfidf_fit(docs, v);
    CHECK(idf.idf[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(idf.idf[1] == doctest::Approx(1.4054651081081644).epsilon(1e-12));

    std::vector<TokenDoc> one = {doc_of({"a"})};
    Vocabulary v1 = build_vocab(one, 1);
    CHECK(tfidf_fit(one, v1).idf[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tfidf_transform matches the hand-computed example") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b"}), doc_of({"a"})};
    Vocabulary v = build_vocab(docs, 1);
    IdfTable idf = tfidf_fit(docs, v);

    SparseVector x = tfidf_transform(docs[0], v, idf);
    REQUIRE(x.entries.size() == 2);
    auto oracle = oracle_tfidf({{"a", "b"}, {"a"}});
    CHECK(x.entries[0].second == doctest::Approx(oracle[0]["a"]).epsilon(1e-13));
    CHECK(x.entries[1].second == doctest::Approx(oracle[0]["b"]).epsilon(1e-13));
    CHECK(x.entries[0].second == doctest::Approx(0.5797386715376658).epsilon(1e-9));
    CHECK(x.entries[1].second == doctest::Approx(0.8148024746671689).epsilon(1e-9));

    SparseVector single = tfidf_transform(docs[1], v, idf);
    REQUIRE(single.entries.size() == 1);
    CHECK(single.entries[0].second == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(tfidf_transform(doc_of({}), v, idf).entries.empty());
}

TEST_CASE("tfidf matches the brute-force oracle on random corpora") {
    Rng rng(42);
    const std::string alphabet[] = {"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"};
    for (int corpus_i = 0; corpus_i < 20; ++corpus_i) {
        std::vector<std::vector<std::string>> raw;
        const int n_docs = 1 + static_cast<int>(rng.bounded(10));
        for (int di = 0; di < n_docs; ++di) {
            std::vector<std::string> toks;
            const int len = static_cast<int>(rng.bounded(12));
            for (int t = 0; t < len; ++t) toks.push_back(alphabet[rng.bounded(8)]);
            raw.push_back(std::move(toks));
        }
        if (raw[0].empty()) raw[0].push_back("t0");

        std::vector<TokenDoc> docs;
        for (auto& toks : raw) docs.push_back(doc_of(toks));
        Vocabulary v = build_vocab(docs, 1);
        IdfTable idf = tfidf_fit(docs, v);
        auto oracle = oracle_tfidf(raw);

        for (std::size_t di = 0; di < docs.size(); ++di) {
            SparseVector x = tfidf_transform(docs[di], v, idf);
            REQUIRE(x.entries.size() == oracle[di].size());
            for (const auto& [idx, val] : x.entries) {
                const std::string& tok = v.tokens[static_cast<std::size_t>(idx)];
                REQUIRE(oracle[di].count(tok) == 1);
                CHECK(std::abs(val - oracle[di][tok]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("tfidf vectors are unit length and share support with bow") {
    Rng rng(7);
    const std::string alphabet[] = {"u0", "u1", "u2", "u3", "u4"};
    std::vector<TokenDoc> docs;
    for (int di = 0; di < 15; ++di) {
        std::vector<std::string> toks;
        const int len = static_cast<int>(rng.bounded(9));
        for (int t = 0; t < len; ++t) toks.push_back(alphabet[rng.bounded(5)]);
        docs.push_back(doc_of(toks));
    }
    docs[0].tokens = {"u0"};
    Vocabulary v = build_vocab(docs, 1);
    IdfTable idf = tfidf_fit(docs, v);
    for (double x : idf.idf) CHECK(x >= 1.0);

    for (const auto& d : docs) {
        SparseVector bow = bow_vectorize(d, v);
        SparseVector tf = tfidf_transform(d, v, idf);
        REQUIRE(bow.entries.size() == tf.entries.size());
        for (std::size_t e = 0; e < bow.entries.size(); ++e)
            CHECK(bow.entries[e].first == tf.entries[e].first);
        const double norm = tf.l2_norm();
        if (d.tokens.empty())
            CHECK(norm == 0.0);
        else
            CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
}

TEST_CASE("features artifact round trip") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b"}), doc_of({"a"})};
    Vocabulary v = build_vocab(docs, 1);
    IdfTable idf = tfidf_fit(docs, v);

    auto [v2, idf2] = features_artifact_from_json(features_artifact_to_json(v, idf));
    CHECK(v2.tokens == v.tokens);
    CHECK(v2.doc_freq == v.doc_freq);
    CHECK(v2.n_docs == v.n_docs);
    REQUIRE(idf2.has_value());
    CHECK(idf2->idf == idf.idf);

    auto [v3, no_idf] = features_artifact_from_json(features_artifact_to_json(v, std::nullopt));
    CHECK(v3.find("b") == 1);
    CHECK(!no_idf.has_value());

    auto bad = features_artifact_to_json(v, idf);
    bad.replace(bad.find("\"version\":1"), 11, "\"version\":9");
    CHECK_THROWS_AS(features_artifact_from_json(bad), VersionMismatch);
}
