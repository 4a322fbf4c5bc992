#pragma once

#include <string>
#include <utility>
#include <vector>

#include "notecls/vectors.hpp"

namespace notecls {

// Univariate selection result: per-feature scores plus the kept index set.
// Transforming train and test with the same model keeps columns aligned:
// reduced column j is original column kept_indices[j].
struct SelectorModel {
    std::vector<double> scores;
    std::vector<int> kept_indices; // sorted ascending
    int input_dim = 0;

    int k() const { return static_cast<int>(kept_indices.size()); }
};

// Chi-square statistic between observed per-class feature sums and the sums
// expected under the class priors. Requires nonnegative features (BoW or
// TF-IDF); all-zero features score 0.
std::vector<double> score_chi2(const std::vector<SparseVector>& X, const std::vector<int>& y);

// One-way ANOVA F statistic per feature: between-class mean square over
// within-class mean square. Zero within-class variance with nonzero
// between-class variance scores +infinity (ranked above all finite scores);
// zero over zero scores 0.
std::vector<double> score_f_classif(const std::vector<DenseVector>& X, const std::vector<int>& y);

// Keeps the k top-scoring features, ties broken toward the lower original
// index. The reduced vectors are re-indexed densely, preserving original
// relative order.
std::pair<std::vector<SparseVector>, SelectorModel>
select_k_best(const std::vector<SparseVector>& X, const std::vector<double>& scores, int k);

std::pair<std::vector<DenseVector>, SelectorModel>
select_k_best(const std::vector<DenseVector>& X, const std::vector<double>& scores, int k);

SparseVector apply_selector(const SelectorModel& model, const SparseVector& x);
DenseVector apply_selector(const SelectorModel& model, const DenseVector& x);

// Versioned JSON artifact {version, input_dim, k, kept_indices, scores}.
std::string selector_to_json(const SelectorModel& model);
SelectorModel selector_from_json(const std::string& text);

} // namespace notecls
