#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "notecls/eval.hpp"
#include "notecls/rng.hpp"
#include "notecls/synth.hpp"

using namespace notecls;

namespace {

std::vector<int> fold_sizes(const Folds& folds) {
    std::vector<int> sizes(static_cast<std::size_t>(folds.k), 0);
    for (int f : folds.assignments) sizes[static_cast<std::size_t>(f)]++;
    return sizes;
}

GridConfig tiny_grid_config() {
    GridConfig cfg;
    cfg.k = 3;
    cfg.seed = 1;
    cfg.embed.dim = 16;
    cfg.embed.epochs = 2;
    cfg.embed.window = 3;
    cfg.mlp.hidden = {16};
    cfg.mlp.epochs = 30;
    cfg.lr.epochs = 80;
    return cfg;
}

Corpus tiny_corpus() {
    SynthConfig sc;
    sc.n_docs = 60;
    sc.doc_len_min = 15;
    sc.doc_len_max = 30;
    sc.vocab_size = 120;
    sc.n_patients = 20;
    sc.n_providers = 10;
    sc.signal_strength = 0.8;
    sc.seed = 3;
    return generate_corpus(sc);
}

} // namespace

TEST_CASE("kfold_split partitions with near-equal sizes") {
    std::vector<int> labels(10, 0);
    for (int i = 0; i < 5; ++i) labels[static_cast<std::size_t>(i)] = 1;

    Folds five = kfold_split(labels, 5, 1, false);
    CHECK(fold_sizes(five) == std::vector<int>{2, 2, 2, 2, 2});

    Folds three = kfold_split(labels, 3, 1, false);
    auto sizes = fold_sizes(three);
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    CHECK(sizes == std::vector<int>{4, 3, 3});

    for (int f : three.assignments) {
        CHECK(f >= 0);
        CHECK(f < 3);
    }
}

TEST_CASE("stratified folds balance the positive class") {
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) labels.push_back(1);
    for (int i = 0; i < 6; ++i) labels.push_back(0);
    Folds folds = kfold_split(labels, 3, 7, true);
    std::vector<int> pos_per_fold(3, 0);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == 1) pos_per_fold[static_cast<std::size_t>(folds.assignments[i])]++;
    CHECK(pos_per_fold == std::vector<int>{2, 2, 2});
}

TEST_CASE("stratified fold sizes and positives stay within one over random shapes") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 12 + static_cast<int>(rng.bounded(60));
        const int k = 2 + static_cast<int>(rng.bounded(4));
        std::vector<int> labels;
        int pos = k + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - 2 * k)));
        for (int i = 0; i < n; ++i) labels.push_back(i < pos ? 1 : 0);
        Rng shuffler(trial);
        shuffler.shuffle(labels);

        Folds folds = kfold_split(labels, k, trial, true);
        auto sizes = fold_sizes(folds);
        std::vector<int> pos_per(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == 1) pos_per[static_cast<std::size_t>(folds.assignments[i])]++;
        CHECK(*std::max_element(sizes.begin(), sizes.end()) -
                  *std::min_element(sizes.begin(), sizes.end()) <= 1);
        CHECK(*std::max_element(pos_per.begin(), pos_per.end()) -
                  *std::min_element(pos_per.begin(), pos_per.end()) <= 1);

        Folds again = kfold_split(labels, k, trial, true);
        CHECK(again.assignments == folds.assignments);
    }
}

TEST_CASE("kfold_split error contracts") {
    std::vector<int> labels = {1, 0, 1, 0};
    CHECK_THROWS_AS(kfold_split(labels, 5, 1, false), KTooLarge);
    CHECK_THROWS_AS(kfold_split({1, 1, 1, 0}, 2, 1, true), ClassTooSmall);
}

TEST_CASE("compute_metrics matches the hand-built confusion example") {
    // TP=3, FP=1, FN=2, TN=4
    std::vector<int> y_true = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    std::vector<int> y_pred = {1, 1, 1, 0, 0, 1, 0, 0, 0, 0};
    MetricsReport m = compute_metrics(y_true, y_pred);
    CHECK(m.tp == 3);
    CHECK(m.fp == 1);
    CHECK(m.fn == 2);
    CHECK(m.tn == 4);
    CHECK(m.acc == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(m.pre == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.rec == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(m.f1 == doctest::Approx(0.6666666666666666).epsilon(1e-4));
    CHECK(!m.zero_division);
}

TEST_CASE("compute_metrics degenerate conventions") {
    MetricsReport perfect = compute_metrics({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.acc == 1.0);
    CHECK(perfect.pre == 1.0);
    CHECK(perfect.rec == 1.0);
    CHECK(perfect.f1 == 1.0);

    MetricsReport none = compute_metrics({1, 1, 0}, {0, 0, 0});
    CHECK(none.pre == 0.0);
    CHECK(none.f1 == 0.0);
    CHECK(none.zero_division);

    CHECK_THROWS_AS(compute_metrics({1, 0}, {1}), LengthMismatch);
}

TEST_CASE("compute_metrics agrees with brute-force counting on random vectors") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.bounded(40);
        std::vector<int> y_true(n), y_pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            y_true[i] = static_cast<int>(rng.bounded(2));
            y_pred[i] = static_cast<int>(rng.bounded(2));
        }
        MetricsReport m = compute_metrics(y_true, y_pred);
        long tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (y_true[i] == 1 && y_pred[i] == 1) tp++;
            if (y_true[i] == 0 && y_pred[i] == 1) fp++;
            if (y_true[i] == 1 && y_pred[i] == 0) fn++;
            if (y_true[i] == 0 && y_pred[i] == 0) tn++;
        }
        CHECK(m.tp == tp);
        CHECK(m.fp == fp);
        CHECK(m.fn == fn);
        CHECK(m.tn == tn);
        CHECK(m.acc == doctest::Approx(static_cast<double>(tp + tn) / static_cast<double>(n)));
        const double pre = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        CHECK(m.pre == doctest::Approx(pre));
        CHECK(m.rec == doctest::Approx(rec));
        const double f1 = pre + rec > 0 ? 2 * pre * rec / (pre + rec) : 0.0;
        CHECK(m.f1 == doctest::Approx(f1));
    }
}

TEST_CASE("grouped folds keep components together and all samples assigned") {
    Corpus corpus = tiny_corpus();
    Folds folds = grouped_stratified_folds(corpus, 3, 9);
    REQUIRE(folds.assignments.size() == corpus.size());
    for (int f : folds.assignments) {
        CHECK(f >= 0);
        CHECK(f < 3);
    }
    CHECK_NOTHROW(verify_fold_disjointness(corpus, folds));

    Folds again = grouped_stratified_folds(corpus, 3, 9);
    CHECK(again.assignments == folds.assignments);
}

TEST_CASE("grouped folds need at least k groups") {
    Corpus corpus;
    for (int i = 0; i < 8; ++i) {
        Note n;
        n.id = "n" + std::to_string(i);
        n.patient_id = "p" + std::to_string(i % 2);
        n.provider_id = "d" + std::to_string(i % 2);
        n.text = "x";
        n.label = i % 2 ? Label::Positive : Label::Negative;
        corpus.notes.push_back(n);
    }
    CHECK_THROWS_AS(grouped_stratified_folds(corpus, 3, 1), InsufficientGroups);
}

TEST_CASE("fold contamination guard trips on a reassigned note") {
    Corpus corpus = tiny_corpus();
    Folds folds = grouped_stratified_folds(corpus, 3, 9);
    // move one note of a multi-note patient to a different fold
    std::map<std::string, std::vector<std::size_t>> by_patient;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        by_patient[corpus.notes[i].patient_id].push_back(i);
    for (const auto& [patient, idxs] : by_patient) {
        if (idxs.size() < 2) continue;
        Folds mutated = folds;
        mutated.assignments[idxs[0]] = (mutated.assignments[idxs[0]] + 1) % 3;
        CHECK_THROWS_AS(verify_fold_disjointness(corpus, mutated), ContaminationError);
        break;
    }
}

TEST_CASE("fitted fold artifacts ignore held-out documents") {
    Corpus corpus = tiny_corpus();
    GridConfig cfg = tiny_grid_config();
    const auto docs = preprocess_corpus(corpus, cfg.preprocess);
    Folds folds = grouped_stratified_folds(corpus, cfg.k, cfg.seed);

    // mutate every test-fold document beyond recognition
    const int fold = 1;
    auto mutated = docs;
    for (std::size_t i = 0; i < mutated.size(); ++i) {
        if (folds.assignments[i] != fold) continue;
        mutated[i].tokens = {"zzz", "qqq", "xxx"};
        mutated[i].label = mutated[i].label == Label::Positive ? Label::Negative : Label::Positive;
    }

    for (Representation repr :
         {Representation::Bow, Representation::Tfidf, Representation::Embeddings}) {
        for (bool sel : {false, true}) {
            const std::string a = fit_cell_fold_artifacts(docs, folds, fold, repr,
                                                          ClassifierKind::LR, sel, cfg);
            const std::string b = fit_cell_fold_artifacts(mutated, folds, fold, repr,
                                                          ClassifierKind::LR, sel, cfg);
            CHECK(a == b);
        }
    }
    // and mutating a TRAIN document must change the fitted artifacts
    auto train_mutated = docs;
    for (std::size_t i = 0; i < train_mutated.size(); ++i) {
        if (folds.assignments[i] == fold) continue;
        train_mutated[i].tokens.push_back("sentinelle");
        break;
    }
    CHECK(fit_cell_fold_artifacts(docs, folds, fold, Representation::Bow, ClassifierKind::LR,
                                  false, cfg) !=
          fit_cell_fold_artifacts(train_mutated, folds, fold, Representation::Bow,
                                  ClassifierKind::LR, false, cfg));
}

TEST_CASE("run_grid yields 18 deterministic rows with metrics in range") {
    Corpus corpus = tiny_corpus();
    GridConfig cfg = tiny_grid_config();
    GridReport report = run_grid(corpus, cfg);
    REQUIRE(report.rows.size() == 18);

    std::set<std::string> seen;
    for (const GridRow& row : report.rows) {
        for (double v : {row.acc, row.pre, row.rec, row.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        seen.insert(std::string(to_string(row.representation)) + "/" +
                    to_string(row.classifier) + "/" + (row.with_selection ? "w" : "wo"));
    }
    CHECK(seen.size() == 18);

    GridReport again = run_grid(corpus, cfg);
    CHECK(report.to_csv() == again.to_csv());
    CHECK(report.to_text_table() == again.to_text_table());

    // strong signal: the tfidf cells should separate well even on this
    // miniature corpus
    CHECK(report.row(Representation::Tfidf, ClassifierKind::LR, false).acc > 0.8);

    const std::string csv = report.to_csv();
    CHECK(csv.find("representation,classifier,selection,acc,pre,rec,f1") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 19);
}

TEST_CASE("run_grid rejects unlabeled corpora") {
    Corpus corpus = tiny_corpus();
    corpus.notes[5].label = Label::Unlabeled;
    CHECK_THROWS_AS(run_grid(corpus, tiny_grid_config()), InvalidArgument);
}
