#include "notecls/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "notecls/rng.hpp"

namespace notecls {

const char* to_string(Representation r) {
    switch (r) {
        case Representation::Bow: return "BoW";
        case Representation::Tfidf: return "TF-IDF";
        case Representation::Embeddings: return "Embeddings";
    }
    return "?";
}

const char* to_string(ClassifierKind c) {
    switch (c) {
        case ClassifierKind::LR: return "LR";
        case ClassifierKind::GaussianNB: return "GaussianNB";
        case ClassifierKind::MlpNN: return "MLP-NN";
    }
    return "?";
}

Folds kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed, bool stratified) {
    const std::size_t n = labels.size();
    if (k < 2) throw InvalidArgument("k must be >= 2");
    if (static_cast<std::size_t>(k) > n)
        throw KTooLarge("k = " + std::to_string(k) + " exceeds sample count " + std::to_string(n));

    Folds folds;
    folds.k = k;
    folds.assignments.assign(n, -1);

    if (!stratified) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(derive_seed(seed, {"kfold"}));
        rng.shuffle(idx);
        std::size_t pos = 0;
        for (int f = 0; f < k; ++f) {
            std::size_t size = n / static_cast<std::size_t>(k) +
                               (static_cast<std::size_t>(f) < n % static_cast<std::size_t>(k) ? 1 : 0);
            for (std::size_t i = 0; i < size; ++i)
                folds.assignments[idx[pos + i]] = f;
            pos += size;
        }
        return folds;
    }

    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < n; ++i) (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < static_cast<std::size_t>(k) || neg_idx.size() < static_cast<std::size_t>(k))
        throw ClassTooSmall("every class needs at least k samples for stratified folds");

    Rng rng(derive_seed(seed, {"kfold", "stratified"}));
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);

    std::vector<std::size_t> fold_total(static_cast<std::size_t>(k), 0);
    auto distribute = [&](const std::vector<std::size_t>& cls) {
        const std::size_t base = cls.size() / static_cast<std::size_t>(k);
        const std::size_t rem = cls.size() % static_cast<std::size_t>(k);
        // remainders go to the currently smallest folds so total sizes stay
        // within one of each other
        std::vector<int> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fold_total[static_cast<std::size_t>(a)] < fold_total[static_cast<std::size_t>(b)];
        });
        std::vector<std::size_t> quota(static_cast<std::size_t>(k), base);
        for (std::size_t r = 0; r < rem; ++r) ++quota[static_cast<std::size_t>(order[r])];
        std::size_t p = 0;
        for (int f = 0; f < k; ++f) {
            for (std::size_t q = 0; q < quota[static_cast<std::size_t>(f)]; ++q)
                folds.assignments[cls[p++]] = f;
            fold_total[static_cast<std::size_t>(f)] += quota[static_cast<std::size_t>(f)];
        }
    };
    distribute(pos_idx);
    distribute(neg_idx);
    return folds;
}

Folds grouped_stratified_folds(const Corpus& corpus, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("k must be >= 2");
    const std::vector<int> comp = contamination_components(corpus);
    const int n_comp = comp.empty() ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
    if (n_comp < k)
        throw InsufficientGroups("only " + std::to_string(n_comp) +
                                 " patient/provider groups for " + std::to_string(k) + " folds");

    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_comp));
    std::vector<long> comp_pos(static_cast<std::size_t>(n_comp), 0);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        members[static_cast<std::size_t>(comp[i])].push_back(i);
        if (corpus.notes[i].label == Label::Positive) ++comp_pos[static_cast<std::size_t>(comp[i])];
    }

    long total_pos = 0;
    for (long p : comp_pos) total_pos += p;
    const double pos_ratio = static_cast<double>(total_pos) / static_cast<double>(corpus.size());

    // seeded shuffle for tie order, then largest and most class-skewed
    // components first so the greedy step has slack to balance them out
    std::vector<int> order(static_cast<std::size_t>(n_comp));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {"grouped_folds"}));
    rng.shuffle(order);
    auto skew = [&](int c) {
        return std::abs(static_cast<double>(comp_pos[static_cast<std::size_t>(c)]) -
                        pos_ratio * static_cast<double>(members[static_cast<std::size_t>(c)].size()));
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const std::size_t sa = members[static_cast<std::size_t>(a)].size();
        const std::size_t sb = members[static_cast<std::size_t>(b)].size();
        if (sa != sb) return sa > sb;
        return skew(a) > skew(b);
    });

    Folds folds;
    folds.k = k;
    folds.assignments.assign(corpus.size(), -1);
    std::vector<std::size_t> fold_size(static_cast<std::size_t>(k), 0);
    std::vector<long> fold_pos(static_cast<std::size_t>(k), 0);
    for (int c : order) {
        const std::size_t c_size = members[static_cast<std::size_t>(c)].size();
        const long c_pos = comp_pos[static_cast<std::size_t>(c)];
        // smallest projected fold first; among size ties, minimize the
        // projected positive-count deviation from perfect stratification
        int best = 0;
        double best_dev = 0.0;
        for (int f = 0; f < k; ++f) {
            const std::size_t size_after = fold_size[static_cast<std::size_t>(f)] + c_size;
            const double dev =
                std::abs(static_cast<double>(fold_pos[static_cast<std::size_t>(f)] + c_pos) -
                         pos_ratio * static_cast<double>(size_after));
            const std::size_t best_after = fold_size[static_cast<std::size_t>(best)] + c_size;
            if (f == 0 || size_after < best_after ||
                (size_after == best_after && dev < best_dev)) {
                best = f;
                best_dev = dev;
            }
        }
        for (std::size_t i : members[static_cast<std::size_t>(c)])
            folds.assignments[i] = best;
        fold_size[static_cast<std::size_t>(best)] += c_size;
        fold_pos[static_cast<std::size_t>(best)] += c_pos;
    }
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f)
        if (fold_size[f] == 0) throw InsufficientGroups("a fold received no group");

    // local search: swap equal-sized components between folds while that
    // lowers the total positive-count deviation; sizes stay untouched
    std::vector<int> comp_fold(static_cast<std::size_t>(n_comp));
    for (int c = 0; c < n_comp; ++c)
        comp_fold[static_cast<std::size_t>(c)] =
            folds.assignments[members[static_cast<std::size_t>(c)].front()];
    auto deviation = [&](int f, long delta) {
        return std::abs(static_cast<double>(fold_pos[static_cast<std::size_t>(f)] + delta) -
                        pos_ratio * static_cast<double>(fold_size[static_cast<std::size_t>(f)]));
    };
    for (bool improved = true; improved;) {
        improved = false;
        for (int a = 0; a < n_comp; ++a) {
            for (int b = a + 1; b < n_comp; ++b) {
                const int fa = comp_fold[static_cast<std::size_t>(a)];
                const int fb = comp_fold[static_cast<std::size_t>(b)];
                if (fa == fb) continue;
                if (members[static_cast<std::size_t>(a)].size() !=
                    members[static_cast<std::size_t>(b)].size())
                    continue;
                const long diff = comp_pos[static_cast<std::size_t>(b)] -
                                  comp_pos[static_cast<std::size_t>(a)];
                if (diff == 0) continue;
                const double before = deviation(fa, 0) + deviation(fb, 0);
                const double after = deviation(fa, diff) + deviation(fb, -diff);
                if (after + 1e-9 < before) {
                    comp_fold[static_cast<std::size_t>(a)] = fb;
                    comp_fold[static_cast<std::size_t>(b)] = fa;
                    fold_pos[static_cast<std::size_t>(fa)] += diff;
                    fold_pos[static_cast<std::size_t>(fb)] -= diff;
                    improved = true;
                }
            }
        }
    }
    for (int c = 0; c < n_comp; ++c)
        for (std::size_t i : members[static_cast<std::size_t>(c)])
            folds.assignments[i] = comp_fold[static_cast<std::size_t>(c)];
    return folds;
}

void verify_fold_disjointness(const Corpus& corpus, const Folds& folds) {
    if (corpus.size() != folds.assignments.size())
        throw LengthMismatch(corpus.size(), folds.assignments.size());
    std::unordered_map<std::string, int> patient_fold, provider_fold;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const int f = folds.assignments[i];
        auto [pit, pnew] = patient_fold.try_emplace(corpus.notes[i].patient_id, f);
        if (!pnew && pit->second != f)
            throw ContaminationError("patient_id " + corpus.notes[i].patient_id +
                                     " spans folds " + std::to_string(pit->second) + " and " +
                                     std::to_string(f));
        auto [cit, cnew] = provider_fold.try_emplace(corpus.notes[i].provider_id, f);
        if (!cnew && cit->second != f)
            throw ContaminationError("provider_id " + corpus.notes[i].provider_id +
                                     " spans folds " + std::to_string(cit->second) + " and " +
                                     std::to_string(f));
    }
}

MetricsReport compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw LengthMismatch(y_true.size(), y_pred.size());
    if (y_true.empty()) throw InvalidArgument("compute_metrics needs at least one sample");
    MetricsReport m;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            (y_pred[i] == 1 ? m.tp : m.fn)++;
        else
            (y_pred[i] == 1 ? m.fp : m.tn)++;
    }
    const double n = static_cast<double>(y_true.size());
    m.acc = static_cast<double>(m.tp + m.tn) / n;
    if (m.tp + m.fp > 0) {
        m.pre = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    } else {
        m.zero_division = true;
    }
    if (m.tp + m.fn > 0) {
        m.rec = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    } else {
        m.zero_division = true;
    }
    if (m.pre + m.rec > 0.0) {
        m.f1 = 2.0 * m.pre * m.rec / (m.pre + m.rec);
    } else {
        m.f1 = 0.0;
        m.zero_division = true;
    }
    return m;
}

namespace {

struct FoldDocs {
    std::vector<TokenDoc> train, test;
    std::vector<int> y_train, y_test;
};

FoldDocs split_fold(const std::vector<TokenDoc>& docs, const Folds& folds, int fold) {
    if (docs.size() != folds.assignments.size())
        throw LengthMismatch(docs.size(), folds.assignments.size());
    FoldDocs fd;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const bool in_test = folds.assignments[i] == fold;
        auto& bucket = in_test ? fd.test : fd.train;
        auto& ybucket = in_test ? fd.y_test : fd.y_train;
        bucket.push_back(docs[i]);
        if (docs[i].label == Label::Unlabeled)
            throw InvalidArgument("grid requires a fully labeled corpus (note " + docs[i].note_id + ")");
        ybucket.push_back(docs[i].label == Label::Positive ? 1 : 0);
    }
    return fd;
}

// One representation fitted on a fold's training docs, applied to both sides.
struct ReprData {
    bool dense = false;
    std::vector<SparseVector> train_s, test_s;
    std::vector<DenseVector> train_d, test_d;
    Vocabulary vocab;
    std::optional<IdfTable> idf;
    std::optional<EmbeddingTable> emb;

    int feature_dim() const {
        if (dense) return train_d.empty() ? 0 : train_d.front().dim();
        return train_s.empty() ? 0 : train_s.front().dim;
    }
};

ReprData fit_repr_fold(const FoldDocs& fd, Representation repr, const GridConfig& cfg,
                       std::uint64_t repr_seed) {
    ReprData rd;
    rd.vocab = build_vocab(fd.train, cfg.min_df);
    switch (repr) {
        case Representation::Bow:
            for (const auto& d : fd.train) rd.train_s.push_back(bow_vectorize(d, rd.vocab));
            for (const auto& d : fd.test) rd.test_s.push_back(bow_vectorize(d, rd.vocab));
            break;
        case Representation::Tfidf:
            rd.idf = tfidf_fit(fd.train, rd.vocab);
            for (const auto& d : fd.train) rd.train_s.push_back(tfidf_transform(d, rd.vocab, *rd.idf));
            for (const auto& d : fd.test) rd.test_s.push_back(tfidf_transform(d, rd.vocab, *rd.idf));
            break;
        case Representation::Embeddings: {
            SkipgramConfig sc = cfg.embed;
            sc.seed = repr_seed;
            rd.emb = train_skipgram(fd.train, rd.vocab, sc);
            rd.dense = true;
            for (const auto& d : fd.train) rd.train_d.push_back(doc_embed(d, *rd.emb));
            for (const auto& d : fd.test) rd.test_d.push_back(doc_embed(d, *rd.emb));
            break;
        }
    }
    return rd;
}

// Selection fitted on training features only; explicit K is clamped to the
// fold's feature count, the default is min(1000, feature count).
struct SelectedData {
    SelectorModel selector;
    std::vector<SparseVector> train_s, test_s;
    std::vector<DenseVector> train_d, test_d;
};

SelectedData fit_selection(const ReprData& rd, const std::vector<int>& y_train,
                           const GridConfig& cfg) {
    SelectedData sd;
    const int dim = rd.feature_dim();
    int k = cfg.select_k ? std::min(*cfg.select_k, dim) : std::min(1000, dim);
    if (cfg.select_k && *cfg.select_k < 1)
        throw KTooSmall("--select-k must be >= 1, got " + std::to_string(*cfg.select_k));
    if (rd.dense) {
        auto scores = score_f_classif(rd.train_d, y_train);
        auto [reduced, model] = select_k_best(rd.train_d, scores, k);
        sd.train_d = std::move(reduced);
        sd.selector = std::move(model);
        for (const auto& x : rd.test_d) sd.test_d.push_back(apply_selector(sd.selector, x));
    } else {
        auto scores = score_chi2(rd.train_s, y_train);
        auto [reduced, model] = select_k_best(rd.train_s, scores, k);
        sd.train_s = std::move(reduced);
        sd.selector = std::move(model);
        for (const auto& x : rd.test_s) sd.test_s.push_back(apply_selector(sd.selector, x));
    }
    return sd;
}

struct FittedClassifier {
    std::optional<LRModel> lr;
    std::optional<GNBModel> gnb;
    std::optional<MLPModel> mlp;

    std::string to_json() const {
        if (lr) return lr_to_json(*lr);
        if (gnb) return gnb_to_json(*gnb);
        return mlp_to_json(*mlp);
    }
};

template <class XV>
FittedClassifier fit_classifier(const std::vector<XV>& Xtr, const std::vector<int>& ytr,
                                ClassifierKind clf, const GridConfig& cfg,
                                std::uint64_t cell_seed) {
    FittedClassifier fc;
    switch (clf) {
        case ClassifierKind::LR: {
            LrConfig c = cfg.lr;
            c.seed = cell_seed;
            fc.lr = lr_fit(Xtr, ytr, c);
            break;
        }
        case ClassifierKind::GaussianNB:
            fc.gnb = gnb_fit(Xtr, ytr, cfg.var_smoothing);
            break;
        case ClassifierKind::MlpNN: {
            MlpConfig c = cfg.mlp;
            c.seed = cell_seed;
            fc.mlp = mlp_fit(Xtr, ytr, c);
            break;
        }
    }
    return fc;
}

template <class XV>
std::vector<int> predict_all(const FittedClassifier& fc, const std::vector<XV>& X,
                             double threshold) {
    std::vector<int> pred;
    pred.reserve(X.size());
    for (const auto& x : X) {
        double p = fc.lr ? lr_predict_proba(*fc.lr, x)
                         : fc.gnb ? gnb_predict_proba(*fc.gnb, x)
                                  : mlp_predict_proba(*fc.mlp, x);
        pred.push_back(predict_label(p, threshold));
    }
    return pred;
}

std::uint64_t repr_seed_for(const GridConfig& cfg, Representation repr, int fold) {
    return derive_seed(cfg.seed, {"repr", to_string(repr)}, static_cast<std::uint64_t>(fold));
}

std::uint64_t cell_seed_for(const GridConfig& cfg, Representation repr, ClassifierKind clf,
                            bool sel, int fold) {
    return derive_seed(cfg.seed,
                       {"cell", to_string(repr), to_string(clf), sel ? "with" : "without"},
                       static_cast<std::uint64_t>(fold));
}

std::string format_metric(double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

GridReport run_grid(const Corpus& corpus, const GridConfig& config) {
    if (config.k < 2) throw InvalidArgument("k must be >= 2");
    const std::vector<TokenDoc> docs = preprocess_corpus(corpus, config.preprocess);
    const Folds folds = grouped_stratified_folds(corpus, config.k, config.seed);
    verify_fold_disjointness(corpus, folds);

    constexpr Representation kReprs[] = {Representation::Bow, Representation::Tfidf,
                                         Representation::Embeddings};
    constexpr ClassifierKind kClfs[] = {ClassifierKind::LR, ClassifierKind::GaussianNB,
                                        ClassifierKind::MlpNN};

    // representation and selection caches, indexed [repr][fold]
    std::vector<FoldDocs> fold_docs;
    for (int f = 0; f < config.k; ++f) fold_docs.push_back(split_fold(docs, folds, f));

    std::vector<std::vector<ReprData>> repr_cache(3);
    std::vector<std::vector<SelectedData>> sel_cache(3);
    for (std::size_t r = 0; r < 3; ++r) {
        for (int f = 0; f < config.k; ++f) {
            repr_cache[r].push_back(fit_repr_fold(fold_docs[static_cast<std::size_t>(f)], kReprs[r],
                                                  config, repr_seed_for(config, kReprs[r], f)));
            sel_cache[r].push_back(fit_selection(repr_cache[r].back(),
                                                 fold_docs[static_cast<std::size_t>(f)].y_train,
                                                 config));
        }
    }

    GridReport report;
    report.k = config.k;
    report.seed = config.seed;
    for (bool sel : {false, true}) {
        for (std::size_t r = 0; r < 3; ++r) {
            for (ClassifierKind clf : kClfs) {
                double acc = 0, pre = 0, rec = 0, f1 = 0;
                for (int f = 0; f < config.k; ++f) {
                    const FoldDocs& fd = fold_docs[static_cast<std::size_t>(f)];
                    const ReprData& rd = repr_cache[r][static_cast<std::size_t>(f)];
                    const SelectedData& sd = sel_cache[r][static_cast<std::size_t>(f)];
                    const std::uint64_t seed = cell_seed_for(config, kReprs[r], clf, sel, f);
                    MetricsReport m;
                    if (rd.dense) {
                        const auto& Xtr = sel ? sd.train_d : rd.train_d;
                        const auto& Xte = sel ? sd.test_d : rd.test_d;
                        auto fc = fit_classifier(Xtr, fd.y_train, clf, config, seed);
                        m = compute_metrics(fd.y_test, predict_all(fc, Xte, config.threshold));
                    } else {
                        const auto& Xtr = sel ? sd.train_s : rd.train_s;
                        const auto& Xte = sel ? sd.test_s : rd.test_s;
                        auto fc = fit_classifier(Xtr, fd.y_train, clf, config, seed);
                        m = compute_metrics(fd.y_test, predict_all(fc, Xte, config.threshold));
                    }
                    acc += m.acc;
                    pre += m.pre;
                    rec += m.rec;
                    f1 += m.f1;
                }
                const double kf = static_cast<double>(config.k);
                report.rows.push_back(GridRow{kReprs[r], clf, sel, acc / kf, pre / kf, rec / kf,
                                              f1 / kf});
            }
        }
    }
    return report;
}

std::string fit_cell_fold_artifacts(const std::vector<TokenDoc>& docs, const Folds& folds,
                                    int fold, Representation repr, ClassifierKind clf,
                                    bool with_selection, const GridConfig& config) {
    const FoldDocs fd = split_fold(docs, folds, fold);
    const ReprData rd = fit_repr_fold(fd, repr, config, repr_seed_for(config, repr, fold));
    std::ostringstream out;
    if (rd.emb)
        out << embedding_artifact_to_json(*rd.emb);
    else
        out << features_artifact_to_json(rd.vocab, rd.idf);

    const std::uint64_t seed = cell_seed_for(config, repr, clf, with_selection, fold);
    if (with_selection) {
        const SelectedData sd = fit_selection(rd, fd.y_train, config);
        out << '\n' << selector_to_json(sd.selector) << '\n';
        if (rd.dense)
            out << fit_classifier(sd.train_d, fd.y_train, clf, config, seed).to_json();
        else
            out << fit_classifier(sd.train_s, fd.y_train, clf, config, seed).to_json();
    } else {
        out << '\n';
        if (rd.dense)
            out << fit_classifier(rd.train_d, fd.y_train, clf, config, seed).to_json();
        else
            out << fit_classifier(rd.train_s, fd.y_train, clf, config, seed).to_json();
    }
    return out.str();
}

std::string GridReport::to_csv() const {
    std::ostringstream out;
    out << "representation,classifier,selection,acc,pre,rec,f1\n";
    for (const GridRow& r : rows) {
        out << to_string(r.representation) << ',' << to_string(r.classifier) << ','
            << (r.with_selection ? "with" : "without") << ',' << format_metric(r.acc) << ','
            << format_metric(r.pre) << ',' << format_metric(r.rec) << ',' << format_metric(r.f1)
            << '\n';
    }
    return out.str();
}

std::string GridReport::to_text_table() const {
    std::ostringstream out;
    auto block = [&](bool sel, const char* title) {
        out << title << '\n';
        out << "Representation  Classifier   ACC     PRE     REC     F1\n";
        out << "--------------  ----------  ------  ------  ------  ------\n";
        for (const GridRow& r : rows) {
            if (r.with_selection != sel) continue;
            char line[96];
            std::snprintf(line, sizeof(line), "%-14s  %-10s  %s  %s  %s  %s\n",
                          to_string(r.representation), to_string(r.classifier),
                          format_metric(r.acc).c_str(), format_metric(r.pre).c_str(),
                          format_metric(r.rec).c_str(), format_metric(r.f1).c_str());
            out << line;
        }
    };
    block(false, "=== Without feature selection ===");
    out << '\n';
    block(true, "=== With feature selection ===");
    return out.str();
}

const GridRow& GridReport::row(Representation r, ClassifierKind c, bool with_selection) const {
    for (const GridRow& row : rows)
        if (row.representation == r && row.classifier == c && row.with_selection == with_selection)
            return row;
    throw InvalidArgument("no such grid row");
}

} // namespace notecls
