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

// End-to-end fit/predict bundle behind the `fit` and `predict` subcommands:
// preprocessing options, the fitted representation, an optional selector, and
// one classifier, all serialized into a single versioned artifact so predict
// reproduces training-time preprocessing exactly.

struct PipelineConfig {
    std::string model = "lr";       // lr | gnb | mlp
    std::string features = "tfidf"; // bow | tfidf | embed
    PreprocessOptions preprocess;
    int min_df = 1;
    std::optional<int> select_k;
    SkipgramConfig embed;
    LrConfig lr;
    MlpConfig mlp;
    double var_smoothing = 1e-9;
    double threshold = 0.5;
    std::uint64_t seed = 1;
};

struct PipelineModel {
    std::string model_type;
    std::string features;
    PreprocessOptions preprocess; // stopwords holds the resolved list
    double threshold = 0.5;
    Vocabulary vocab;
    std::optional<IdfTable> idf;
    std::optional<EmbeddingTable> emb;
    std::optional<SelectorModel> selector;
    std::optional<LRModel> lr;
    std::optional<GNBModel> gnb;
    std::optional<MLPModel> mlp;
};

struct Prediction {
    std::string id;
    double probability = 0.0;
    Label label = Label::Unlabeled;
};

PipelineModel fit_pipeline(const Corpus& corpus, const PipelineConfig& cfg);

std::vector<Prediction> predict_pipeline(const PipelineModel& model, const Corpus& corpus);

void save_pipeline(const PipelineModel& model, const std::string& path);
PipelineModel load_pipeline(const std::string& path);

void save_predictions_csv(const std::vector<Prediction>& preds, const std::string& path);

} // namespace notecls
