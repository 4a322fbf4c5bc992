#include "notecls/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "notecls/rng.hpp"

namespace notecls {

using nlohmann::json;

namespace {

std::vector<int> labels_of(const std::vector<TokenDoc>& docs) {
    std::vector<int> y;
    y.reserve(docs.size());
    for (const TokenDoc& d : docs) {
        if (d.label == Label::Unlabeled)
            throw InvalidArgument("fit requires labeled notes (note " + d.note_id + ")");
        y.push_back(d.label == Label::Positive ? 1 : 0);
    }
    return y;
}

} // namespace

PipelineModel fit_pipeline(const Corpus& corpus, const PipelineConfig& cfg) {
    if (cfg.model != "lr" && cfg.model != "gnb" && cfg.model != "mlp")
        throw InvalidArgument("unknown model: " + cfg.model);
    if (cfg.features != "bow" && cfg.features != "tfidf" && cfg.features != "embed")
        throw InvalidArgument("unknown feature representation: " + cfg.features);

    PipelineModel pm;
    pm.model_type = cfg.model;
    pm.features = cfg.features;
    pm.preprocess = cfg.preprocess;
    if (!pm.preprocess.stopwords) pm.preprocess.stopwords = default_french_stopwords();
    pm.threshold = cfg.threshold;

    const std::vector<TokenDoc> docs = preprocess_corpus(corpus, pm.preprocess);
    const std::vector<int> y = labels_of(docs);
    pm.vocab = build_vocab(docs, cfg.min_df);

    std::vector<SparseVector> xs;
    std::vector<DenseVector> xd;
    if (cfg.features == "bow") {
        for (const auto& d : docs) xs.push_back(bow_vectorize(d, pm.vocab));
    } else if (cfg.features == "tfidf") {
        pm.idf = tfidf_fit(docs, pm.vocab);
        for (const auto& d : docs) xs.push_back(tfidf_transform(d, pm.vocab, *pm.idf));
    } else {
        SkipgramConfig sc = cfg.embed;
        sc.seed = derive_seed(cfg.seed, {"pipeline", "embed"});
        pm.emb = train_skipgram(docs, pm.vocab, sc);
        for (const auto& d : docs) xd.push_back(doc_embed(d, *pm.emb));
    }

    const bool dense = cfg.features == "embed";
    if (cfg.select_k) {
        const int dim = dense ? (xd.empty() ? 0 : xd.front().dim())
                              : (xs.empty() ? 0 : xs.front().dim);
        if (*cfg.select_k < 1)
            throw KTooSmall("--select-k must be >= 1, got " + std::to_string(*cfg.select_k));
        const int k = std::min(*cfg.select_k, dim);
        if (dense) {
            auto scores = score_f_classif(xd, y);
            auto [reduced, model] = select_k_best(xd, scores, k);
            xd = std::move(reduced);
            pm.selector = std::move(model);
        } else {
            auto scores = score_chi2(xs, y);
            auto [reduced, model] = select_k_best(xs, scores, k);
            xs = std::move(reduced);
            pm.selector = std::move(model);
        }
    }

    const std::uint64_t clf_seed = derive_seed(cfg.seed, {"pipeline", "classifier"});
    if (cfg.model == "lr") {
        LrConfig c = cfg.lr;
        c.seed = clf_seed;
        pm.lr = dense ? lr_fit(xd, y, c) : lr_fit(xs, y, c);
    } else if (cfg.model == "gnb") {
        pm.gnb = dense ? gnb_fit(xd, y, cfg.var_smoothing) : gnb_fit(xs, y, cfg.var_smoothing);
    } else {
        MlpConfig c = cfg.mlp;
        c.seed = clf_seed;
        pm.mlp = dense ? mlp_fit(xd, y, c) : mlp_fit(xs, y, c);
    }
    return pm;
}

std::vector<Prediction> predict_pipeline(const PipelineModel& pm, const Corpus& corpus) {
    const auto stoplist = build_stoplist(pm.preprocess);
    std::vector<Prediction> preds;
    preds.reserve(corpus.size());
    for (const Note& note : corpus.notes) {
        const TokenDoc doc = preprocess_note(note, pm.preprocess, stoplist);
        double proba = 0.0;
        if (pm.features == "embed") {
            DenseVector x = doc_embed(doc, *pm.emb);
            if (pm.selector) x = apply_selector(*pm.selector, x);
            proba = pm.lr ? lr_predict_proba(*pm.lr, x)
                          : pm.gnb ? gnb_predict_proba(*pm.gnb, x)
                                   : mlp_predict_proba(*pm.mlp, x);
        } else {
            SparseVector x = pm.idf ? tfidf_transform(doc, pm.vocab, *pm.idf)
                                    : bow_vectorize(doc, pm.vocab);
            if (pm.selector) x = apply_selector(*pm.selector, x);
            proba = pm.lr ? lr_predict_proba(*pm.lr, x)
                          : pm.gnb ? gnb_predict_proba(*pm.gnb, x)
                                   : mlp_predict_proba(*pm.mlp, x);
        }
        preds.push_back(Prediction{note.id, proba,
                                   proba >= pm.threshold ? Label::Positive : Label::Negative});
    }
    return preds;
}

void save_pipeline(const PipelineModel& pm, const std::string& path) {
    json j;
    j["version"] = 1;
    j["model_type"] = pm.model_type;
    j["features"] = pm.features;
    j["preprocess"] = {{"fold_accents", pm.preprocess.fold_accents},
                       {"drop_numeric", pm.preprocess.drop_numeric},
                       {"stopwords", pm.preprocess.stopwords ? *pm.preprocess.stopwords
                                                             : std::vector<std::string>{}}};
    j["threshold"] = pm.threshold;
    if (pm.emb)
        j["representation"] = json::parse(embedding_artifact_to_json(*pm.emb));
    else
        j["representation"] = json::parse(features_artifact_to_json(pm.vocab, pm.idf));
    j["selector"] = pm.selector ? json::parse(selector_to_json(*pm.selector)) : json(nullptr);
    if (pm.lr)
        j["classifier"] = json::parse(lr_to_json(*pm.lr));
    else if (pm.gnb)
        j["classifier"] = json::parse(gnb_to_json(*pm.gnb));
    else
        j["classifier"] = json::parse(mlp_to_json(*pm.mlp));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

PipelineModel load_pipeline(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw MalformedRecord(1, e.what());
    }
    const int version = j.at("version").get<int>();
    if (version != 1) throw VersionMismatch(1, version);

    PipelineModel pm;
    pm.model_type = j.at("model_type").get<std::string>();
    pm.features = j.at("features").get<std::string>();
    pm.preprocess.fold_accents = j.at("preprocess").at("fold_accents").get<bool>();
    pm.preprocess.drop_numeric = j.at("preprocess").at("drop_numeric").get<bool>();
    pm.preprocess.stopwords = j.at("preprocess").at("stopwords").get<std::vector<std::string>>();
    pm.threshold = j.at("threshold").get<double>();

    if (pm.features == "embed") {
        pm.emb = embedding_artifact_from_json(j.at("representation").dump());
        pm.vocab = pm.emb->vocab;
    } else {
        auto [vocab, idf] = features_artifact_from_json(j.at("representation").dump());
        pm.vocab = std::move(vocab);
        pm.idf = std::move(idf);
        if (pm.features == "tfidf" && !pm.idf)
            throw MalformedRecord(1, "tfidf model artifact is missing its idf table");
    }
    if (!j.at("selector").is_null()) pm.selector = selector_from_json(j.at("selector").dump());
    const std::string clf_type = j.at("classifier").at("model_type").get<std::string>();
    if (clf_type == "lr")
        pm.lr = lr_from_json(j.at("classifier").dump());
    else if (clf_type == "gnb")
        pm.gnb = gnb_from_json(j.at("classifier").dump());
    else
        pm.mlp = mlp_from_json(j.at("classifier").dump());
    return pm;
}

void save_predictions_csv(const std::vector<Prediction>& preds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "id,probability,label\n";
    for (const Prediction& p : preds) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", p.probability);
        out << p.id << ',' << buf << ',' << to_string(p.label) << '\n';
    }
}

} // namespace notecls
