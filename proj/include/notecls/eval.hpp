#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "notecls/classifiers.hpp"
#include "notecls/corpus.hpp"
#include "notecls/embeddings.hpp"
#include "notecls/features.hpp"
#include "notecls/preprocess.hpp"
#include "notecls/select.hpp"

namespace notecls {

// Per-sample fold assignment; fold sizes differ by at most one.
struct Folds {
    int k = 0;
    std::vector<int> assignments;
};

// Seeded partition into k folds. When stratified, per-fold positive counts
// also differ by at most one across folds.
Folds kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed, bool stratified);

// Fold assignment that keeps every patient/provider connected component in a
// single fold, balancing fold sizes and positive counts greedily. This is
// what the experiment grid uses, so no patient or care provider ever spans
// a train/test boundary.
Folds grouped_stratified_folds(const Corpus& corpus, int k, std::uint64_t seed);

// Throws ContaminationError if any patient_id or provider_id appears in more
// than one fold.
void verify_fold_disjointness(const Corpus& corpus, const Folds& folds);

struct MetricsReport {
    double acc = 0.0, pre = 0.0, rec = 0.0, f1 = 0.0;
    long tp = 0, fp = 0, fn = 0, tn = 0;
    bool zero_division = false; // set when a zero denominator forced a 0 metric
};

// Confusion counts and acc/pre/rec/f1 with the zero-division-returns-0
// convention. Positive class is 1.
MetricsReport compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred);

enum class Representation { Bow, Tfidf, Embeddings };
enum class ClassifierKind { LR, GaussianNB, MlpNN };

const char* to_string(Representation r);
const char* to_string(ClassifierKind c);

struct GridConfig {
    int k = 5;
    std::uint64_t seed = 1;
    std::optional<int> select_k; // default: min(1000, feature count)
    int min_df = 1;
    double threshold = 0.5;
    PreprocessOptions preprocess;
    SkipgramConfig embed;   // seed field ignored; derived per fold
    LrConfig lr;            // seed field ignored; derived per cell
    MlpConfig mlp;          // seed field ignored; derived per cell
    double var_smoothing = 1e-9;
};

struct GridRow {
    Representation representation;
    ClassifierKind classifier;
    bool with_selection = false;
    double acc = 0.0, pre = 0.0, rec = 0.0, f1 = 0.0; // fold means
};

// The 18-row representation x classifier x selection result table.
struct GridReport {
    std::vector<GridRow> rows;
    int k = 0;
    std::uint64_t seed = 0;

    std::string to_csv() const;
    std::string to_text_table() const;
    const GridRow& row(Representation r, ClassifierKind c, bool with_selection) const;
};

// Runs all 18 cells with k-fold cross-validation. Every vocabulary, idf
// table, embedding, selector, and classifier is fitted on the training folds
// only; fold assignment keeps patients and providers disjoint.
GridReport run_grid(const Corpus& corpus, const GridConfig& config);

// Everything fitted for one (cell, fold), serialized for byte comparison.
// Exists so tests can prove fitting ignores held-out documents: mutating the
// test fold's text must leave this string unchanged.
std::string fit_cell_fold_artifacts(const std::vector<TokenDoc>& docs, const Folds& folds,
                                    int fold, Representation repr, ClassifierKind clf,
                                    bool with_selection, const GridConfig& config);

} // namespace notecls
