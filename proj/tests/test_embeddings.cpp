#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "notecls/embeddings.hpp"

using namespace notecls;

namespace {

TokenDoc doc_of(std::vector<std::string> tokens) {
    TokenDoc d;
    d.tokens = std::move(tokens);
    return d;
}

Vocabulary vocab_of(const std::vector<std::vector<std::string>>& docs) {
    std::vector<TokenDoc> tds;
    for (const auto& d : docs) tds.push_back(doc_of(d));
    return build_vocab(tds, 1);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    return num / (std::sqrt(na) * std::sqrt(nb) + 1e-300);
}

} // namespace

TEST_CASE("extract_pairs enumerates window neighbors") {
    Vocabulary v = vocab_of({{"x", "y", "z"}});
    auto pairs = extract_pairs(doc_of({"x", "y", "z"}), v, 1);
    const int x = v.find("x"), y = v.find("y"), z = v.find("z");
    REQUIRE(pairs.size() == 4);
    CHECK(pairs[0] == std::pair<int, int>{x, y});
    CHECK(pairs[1] == std::pair<int, int>{y, x});
    CHECK(pairs[2] == std::pair<int, int>{y, z});
    CHECK(pairs[3] == std::pair<int, int>{z, y});

    CHECK(extract_pairs(doc_of({"x"}), v, 1).empty());

    // OOV tokens keep their positions but produce no pairs
    CHECK(extract_pairs(doc_of({"x", "q", "z"}), v, 1).empty());
    CHECK(extract_pairs(doc_of({"x", "q", "z"}), v, 2).size() == 2);
}

TEST_CASE("train_skipgram validates inputs") {
    Vocabulary v = vocab_of({{"a", "b"}});
    std::vector<TokenDoc> docs = {doc_of({"a", "b"})};

    SkipgramConfig bad;
    bad.dim = 0;
    CHECK_THROWS_AS(train_skipgram(docs, v, bad), InvalidDimension);

    SkipgramConfig cfg;
    cfg.dim = 4;
    std::vector<TokenDoc> sparse_docs = {doc_of({"a"}), doc_of({"b"})};
    CHECK_THROWS_AS(train_skipgram(sparse_docs, v, cfg), NoTrainingPairs);
}

TEST_CASE("zero epochs returns the seeded initialization unchanged") {
    Vocabulary v = vocab_of({{"a", "b"}});
    std::vector<TokenDoc> docs = {doc_of({"a", "b"})};
    SkipgramConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 0;
    cfg.seed = 9;
    EmbeddingTable t1 = train_skipgram(docs, v, cfg);
    EmbeddingTable t2 = train_skipgram(docs, v, cfg);
    CHECK(t1.v_central == t2.v_central);
    for (const auto& row : t1.u_context)
        for (double x : row) CHECK(x == 0.0);
    const double half = 0.5 / 4.0;
    for (const auto& row : t1.v_central)
        for (double x : row) {
            CHECK(x >= -half);
            CHECK(x <= half);
        }
}

TEST_CASE("full-softmax gradient matches central finite differences") {
    // |V| = 5, d = 3, one pair; perturb every parameter
    Vocabulary v = vocab_of({{"a", "b", "c", "d", "e"}});
    std::vector<TokenDoc> docs = {doc_of({"a", "b", "c", "d", "e"})};
    SkipgramConfig cfg;
    cfg.dim = 3;
    cfg.epochs = 1;
    cfg.lr = 0.05;
    cfg.seed = 3;
    cfg.mode = SkipgramMode::FullSoftmax;
    EmbeddingTable table = train_skipgram(docs, v, cfg); // some non-trivial point

    const int center = 1, context = 3;
    PairGradient g = pair_gradient(table, center, context);
    const double h = 1e-6;
    double max_rel = 0.0;
    auto rel_err = [](double a, double b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
    };

    for (int k = 0; k < 3; ++k) {
        EmbeddingTable plus = table, minus = table;
        plus.v_central[center][static_cast<std::size_t>(k)] += h;
        minus.v_central[center][static_cast<std::size_t>(k)] -= h;
        const double fd = (pair_nll(plus, center, context) - pair_nll(minus, center, context)) /
                          (2.0 * h);
        max_rel = std::max(max_rel, rel_err(fd, g.grad_v_center[static_cast<std::size_t>(k)]));
    }
    for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < 3; ++k) {
            EmbeddingTable plus = table, minus = table;
            plus.u_context[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] += h;
            minus.u_context[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -= h;
            const double fd =
                (pair_nll(plus, center, context) - pair_nll(minus, center, context)) / (2.0 * h);
            max_rel = std::max(
                max_rel,
                rel_err(fd, g.grad_u[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]));
        }
    }
    CHECK(max_rel < 1e-5);
}

TEST_CASE("epoch NLL strictly decreases on the repeated-bigram corpus") {
    std::vector<TokenDoc> docs;
    for (int i = 0; i < 20; ++i) docs.push_back(doc_of({"a", "b"}));
    Vocabulary v = vocab_of({{"a", "b"}});

    SkipgramConfig cfg;
    cfg.dim = 4;
    cfg.window = 1;
    cfg.epochs = 50;
    cfg.lr = 0.05;
    cfg.seed = 1;
    cfg.mode = SkipgramMode::FullSoftmax;
    std::vector<double> nll;
    train_skipgram(docs, v, cfg, &nll);
    REQUIRE(nll.size() == 50);
    for (std::size_t e = 1; e < nll.size(); ++e) CHECK(nll[e] < nll[e - 1]);
}

TEST_CASE("implied conditional distribution sums to one") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b", "c"}), doc_of({"c", "b", "a"}),
                                  doc_of({"b", "c", "a", "b"})};
    Vocabulary v = build_vocab(docs, 1);
    SkipgramConfig cfg;
    cfg.dim = 6;
    cfg.window = 2;
    cfg.epochs = 10;
    cfg.lr = 0.1;
    cfg.mode = SkipgramMode::FullSoftmax;
    EmbeddingTable table = train_skipgram(docs, v, cfg);
    for (int c = 0; c < v.size(); ++c) {
        auto p = conditional_distribution(table, c);
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        CHECK(std::abs(total - 1.0) <= 1e-9);
    }
}

TEST_CASE("negative sampling also drives its loss down") {
    std::vector<TokenDoc> docs;
    for (int i = 0; i < 40; ++i) docs.push_back(doc_of({"a", "b", "c", "d"}));
    Vocabulary v = build_vocab(docs, 1);
    SkipgramConfig cfg;
    cfg.dim = 8;
    cfg.window = 2;
    cfg.epochs = 12;
    cfg.lr = 0.1;
    cfg.mode = SkipgramMode::NegativeSampling;
    cfg.neg_k = 3;
    std::vector<double> loss;
    train_skipgram(docs, v, cfg, &loss);
    REQUIRE(loss.size() == 12);
    CHECK(loss.back() < loss.front());
}

TEST_CASE("training is deterministic per seed, for both modes") {
    std::vector<TokenDoc> docs;
    for (int i = 0; i < 10; ++i) docs.push_back(doc_of({"a", "b", "c", "d"}));
    Vocabulary v = build_vocab(docs, 1);
    for (SkipgramMode mode : {SkipgramMode::FullSoftmax, SkipgramMode::NegativeSampling}) {
        SkipgramConfig cfg;
        cfg.dim = 5;
        cfg.epochs = 3;
        cfg.seed = 11;
        cfg.mode = mode;
        cfg.neg_k = 2;
        EmbeddingTable t1 = train_skipgram(docs, v, cfg);
        EmbeddingTable t2 = train_skipgram(docs, v, cfg);
        CHECK(t1.v_central == t2.v_central);
        CHECK(t1.u_context == t2.u_context);
    }
}

TEST_CASE("planted co-occurrence is recovered as nearest neighbor") {
    // "milri" co-occurs only with "cec"; the other tokens pair among
    // themselves. The window spans the whole doc, so paired tokens share
    // context distributions and their central vectors align.
    std::vector<TokenDoc> docs;
    for (int i = 0; i < 30; ++i) {
        docs.push_back(doc_of({"milri", "cec", "milri", "cec"}));
        docs.push_back(doc_of({"w1", "w2", "w1", "w2"}));
        docs.push_back(doc_of({"w3", "w4", "w3", "w4"}));
    }
    Vocabulary v = build_vocab(docs, 1);

    int hits = 0;
    const int trials = 20;
    for (int seed = 0; seed < trials; ++seed) {
        SkipgramConfig cfg;
        cfg.dim = 8;
        cfg.window = 3;
        cfg.epochs = 40;
        cfg.lr = 0.15;
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.mode = SkipgramMode::FullSoftmax;
        EmbeddingTable table = train_skipgram(docs, v, cfg);

        const int milri = v.find("milri");
        int best = -1;
        double best_cos = -2.0;
        for (int i = 0; i < v.size(); ++i) {
            if (i == milri) continue;
            const double c = cosine(table.v_central[static_cast<std::size_t>(milri)],
                                    table.v_central[static_cast<std::size_t>(i)]);
            if (c > best_cos) {
                best_cos = c;
                best = i;
            }
        }
        if (best == v.find("cec")) ++hits;
    }
    CHECK(hits >= 19); // >= 95% of seeds
}

TEST_CASE("doc_embed averages central vectors") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b"}), doc_of({"b", "a"})};
    Vocabulary v = build_vocab(docs, 1);
    SkipgramConfig cfg;
    cfg.dim = 3;
    cfg.epochs = 2;
    cfg.window = 1;
    EmbeddingTable t = train_skipgram(docs, v, cfg);

    DenseVector single = doc_embed(doc_of({"a"}), t);
    CHECK(single.values == t.v_central[static_cast<std::size_t>(v.find("a"))]);

    DenseVector pair = doc_embed(doc_of({"a", "b"}), t);
    for (int k = 0; k < 3; ++k) {
        const double want = 0.5 * (t.v_central[0][static_cast<std::size_t>(k)] +
                                   t.v_central[1][static_cast<std::size_t>(k)]);
        CHECK(pair.values[static_cast<std::size_t>(k)] == doctest::Approx(want).epsilon(1e-15));
    }

    DenseVector oov = doc_embed(doc_of({"zz", "qq"}), t);
    for (double x : oov.values) CHECK(x == 0.0);
    CHECK(oov.dim() == 3);
}

TEST_CASE("embedding artifact round trip") {
    std::vector<TokenDoc> docs = {doc_of({"a", "b", "c"})};
    Vocabulary v = build_vocab(docs, 1);
    SkipgramConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 2;
    EmbeddingTable t = train_skipgram(docs, v, cfg);

    EmbeddingTable back = embedding_artifact_from_json(embedding_artifact_to_json(t));
    CHECK(back.dim == t.dim);
    CHECK(back.vocab.tokens == t.vocab.tokens);
    CHECK(back.v_central == t.v_central);
    CHECK(back.u_context == t.u_context);

    std::string bad = embedding_artifact_to_json(t);
    bad.replace(bad.find("\"version\":1"), 11, "\"version\":7");
    CHECK_THROWS_AS(embedding_artifact_from_json(bad), VersionMismatch);
}
