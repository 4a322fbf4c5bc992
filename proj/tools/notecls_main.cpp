// notecls: clinical-note classification toolkit.
//
// Subcommands: synth, preprocess, fit, predict, grid. Every run is fully
// determined by its flags and --seed; a JSON --config file supplies defaults
// that explicit flags override.
//
// Exit codes: 0 success, 1 validation/domain error, 2 I/O or usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "notecls/corpus.hpp"
#include "notecls/eval.hpp"
#include "notecls/pipeline.hpp"
#include "notecls/preprocess.hpp"
#include "notecls/synth.hpp"

namespace {

using nlohmann::json;
using namespace notecls;

// missing path arguments after config merge; maps to exit 2 like other
// usage errors
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_path(const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path);
    try {
        json j;
        in >> j;
        if (!j.is_object()) throw InvalidConfig("config file must hold a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw InvalidConfig(std::string("bad config file: ") + e.what());
    }
}

// Precedence: CLI flag > config file > built-in default. A config key only
// lands if its flag was not given on the command line.
struct ConfigBinder {
    CLI::App* cmd;
    json cfg;

    template <class T>
    void merge(const std::string& key, T& field) {
        if (!cfg.contains(key)) return;
        if (cmd->get_option("--" + key)->count() > 0) return;
        field = cfg.at(key).get<T>();
    }

    void merge_optional(const std::string& key, std::optional<int>& field) {
        if (!cfg.contains(key)) return;
        if (cmd->get_option("--" + key)->count() > 0) return;
        field = cfg.at(key).get<int>();
    }
};

CorpusFormat parse_format(const std::string& s) {
    if (s == "jsonl") return CorpusFormat::Jsonl;
    if (s == "csv") return CorpusFormat::Csv;
    throw InvalidArgument("unknown input format: " + s);
}

PreprocessOptions make_preprocess(bool keep_numeric, bool no_fold_accents,
                                  const std::string& stopword_path) {
    PreprocessOptions opts;
    opts.drop_numeric = !keep_numeric;
    opts.fold_accents = !no_fold_accents;
    if (!stopword_path.empty()) opts.stopwords = load_stopword_file(stopword_path);
    return opts;
}

std::string default_table_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    p.replace_extension(".txt");
    if (p.string() == csv_path) p += ".txt";
    return p.string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

// ---------------------------------------------------------------- commands

struct SynthArgs {
    SynthConfig cfg;
    std::string out;
    std::string config_path;
};

void run_synth(CLI::App* cmd, SynthArgs& a) {
    if (!a.config_path.empty()) {
        ConfigBinder b{cmd, load_config_file(a.config_path)};
        b.merge("n", a.cfg.n_docs);
        b.merge("len-min", a.cfg.doc_len_min);
        b.merge("len-max", a.cfg.doc_len_max);
        b.merge("vocab-size", a.cfg.vocab_size);
        b.merge("signal", a.cfg.signal_strength);
        b.merge("pos-fraction", a.cfg.positive_fraction);
        b.merge("patients", a.cfg.n_patients);
        b.merge("providers", a.cfg.n_providers);
        b.merge("seed", a.cfg.seed);
        b.merge("out", a.out);
    }
    require_path(a.out, "--out");
    save_notes_jsonl(generate_corpus(a.cfg), a.out);
    std::cout << "wrote " << a.cfg.n_docs << " notes to " << a.out << "\n";
}

struct PreprocessArgs {
    std::string input, output, format = "jsonl", stopword_path, config_path;
    bool keep_numeric = false;
    bool no_fold_accents = false;
};

void run_preprocess(CLI::App* cmd, PreprocessArgs& a) {
    if (!a.config_path.empty()) {
        ConfigBinder b{cmd, load_config_file(a.config_path)};
        b.merge("input", a.input);
        b.merge("output", a.output);
        b.merge("format", a.format);
        b.merge("stopwords", a.stopword_path);
        b.merge("keep-numeric", a.keep_numeric);
        b.merge("no-fold-accents", a.no_fold_accents);
    }
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    const Corpus corpus = load_notes(a.input, parse_format(a.format));
    const PreprocessOptions opts = make_preprocess(a.keep_numeric, a.no_fold_accents, a.stopword_path);
    const auto docs = preprocess_corpus(corpus, opts);
    std::ofstream out(a.output, std::ios::binary);
    if (!out) throw IoError("cannot write " + a.output);
    for (const TokenDoc& d : docs) {
        json j;
        j["note_id"] = d.note_id;
        j["tokens"] = d.tokens;
        j["label"] = to_string(d.label);
        out << j.dump() << '\n';
    }
    std::cout << "wrote " << docs.size() << " token docs to " << a.output << "\n";
}

struct FitArgs {
    PipelineConfig cfg;
    std::string input, output, format = "jsonl", stopword_path, config_path;
    bool keep_numeric = false;
    bool no_fold_accents = false;
    bool full_softmax = false;
    int select_k = -1; // -1: no selection
    double clf_lr = -1.0;
    int clf_epochs = -1;
};

void apply_fit_shared(FitArgs& a) {
    a.cfg.preprocess = make_preprocess(a.keep_numeric, a.no_fold_accents, a.stopword_path);
    if (a.select_k >= 0) a.cfg.select_k = a.select_k;
    if (a.full_softmax) a.cfg.embed.mode = SkipgramMode::FullSoftmax;
    if (a.clf_lr > 0.0) {
        a.cfg.lr.lr = a.clf_lr;
        a.cfg.mlp.lr = a.clf_lr;
    }
    if (a.clf_epochs >= 0) {
        a.cfg.lr.epochs = a.clf_epochs;
        a.cfg.mlp.epochs = a.clf_epochs;
    }
}

void merge_fit_config(CLI::App* cmd, FitArgs& a) {
    ConfigBinder b{cmd, load_config_file(a.config_path)};
    b.merge("input", a.input);
    b.merge("output", a.output);
    b.merge("format", a.format);
    b.merge("model", a.cfg.model);
    b.merge("features", a.cfg.features);
    b.merge("stopwords", a.stopword_path);
    b.merge("keep-numeric", a.keep_numeric);
    b.merge("no-fold-accents", a.no_fold_accents);
    b.merge("min-df", a.cfg.min_df);
    b.merge("select-k", a.select_k);
    b.merge("l2", a.cfg.lr.l2);
    b.merge("lr", a.clf_lr);
    b.merge("epochs", a.clf_epochs);
    b.merge("batch", a.cfg.mlp.batch_size);
    b.merge("hidden", a.cfg.mlp.hidden);
    b.merge("dim", a.cfg.embed.dim);
    b.merge("window", a.cfg.embed.window);
    b.merge("embed-epochs", a.cfg.embed.epochs);
    b.merge("embed-lr", a.cfg.embed.lr);
    b.merge("neg", a.cfg.embed.neg_k);
    b.merge("full-softmax", a.full_softmax);
    b.merge("var-smoothing", a.cfg.var_smoothing);
    b.merge("threshold", a.cfg.threshold);
    b.merge("seed", a.cfg.seed);
}

void run_fit(CLI::App* cmd, FitArgs& a) {
    if (!a.config_path.empty()) merge_fit_config(cmd, a);
    apply_fit_shared(a);
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    const Corpus corpus = load_notes(a.input, parse_format(a.format));
    const PipelineModel model = fit_pipeline(corpus, a.cfg);
    save_pipeline(model, a.output);
    std::cout << "fitted " << a.cfg.model << " on " << a.cfg.features << " features ("
              << corpus.size() << " notes) -> " << a.output << "\n";
}

struct PredictArgs {
    std::string model_path, input, output, format = "jsonl", config_path;
    double threshold = -1.0;
};

void run_predict(CLI::App* cmd, PredictArgs& a) {
    if (!a.config_path.empty()) {
        ConfigBinder b{cmd, load_config_file(a.config_path)};
        b.merge("model", a.model_path);
        b.merge("input", a.input);
        b.merge("output", a.output);
        b.merge("format", a.format);
        b.merge("threshold", a.threshold);
    }
    require_path(a.model_path, "--model");
    require_path(a.input, "--input");
    require_path(a.output, "--output");
    PipelineModel model = load_pipeline(a.model_path);
    if (a.threshold >= 0.0) model.threshold = a.threshold;
    const Corpus corpus = load_notes(a.input, parse_format(a.format));
    save_predictions_csv(predict_pipeline(model, corpus), a.output);
    std::cout << "wrote " << corpus.size() << " predictions to " << a.output << "\n";
}

struct GridArgs {
    GridConfig cfg;
    std::string input, format = "jsonl", out = "report.csv", table, stopword_path, config_path;
    bool keep_numeric = false;
    bool no_fold_accents = false;
    bool full_softmax = false;
    int select_k = -1; // -1: default min(1000, dim)
};

void run_grid_cmd(CLI::App* cmd, GridArgs& a) {
    if (!a.config_path.empty()) {
        ConfigBinder b{cmd, load_config_file(a.config_path)};
        b.merge("input", a.input);
        b.merge("format", a.format);
        b.merge("out", a.out);
        b.merge("table", a.table);
        b.merge("k", a.cfg.k);
        b.merge("seed", a.cfg.seed);
        b.merge_optional("select-k", a.cfg.select_k);
        b.merge("min-df", a.cfg.min_df);
        b.merge("stopwords", a.stopword_path);
        b.merge("keep-numeric", a.keep_numeric);
        b.merge("no-fold-accents", a.no_fold_accents);
        b.merge("dim", a.cfg.embed.dim);
        b.merge("window", a.cfg.embed.window);
        b.merge("embed-epochs", a.cfg.embed.epochs);
        b.merge("embed-lr", a.cfg.embed.lr);
        b.merge("neg", a.cfg.embed.neg_k);
        b.merge("full-softmax", a.full_softmax);
        b.merge("l2", a.cfg.lr.l2);
        b.merge("lr-epochs", a.cfg.lr.epochs);
        b.merge("mlp-epochs", a.cfg.mlp.epochs);
        b.merge("batch", a.cfg.mlp.batch_size);
        b.merge("hidden", a.cfg.mlp.hidden);
        b.merge("var-smoothing", a.cfg.var_smoothing);
        b.merge("threshold", a.cfg.threshold);
    }
    if (a.select_k >= 0) a.cfg.select_k = a.select_k;
    if (a.full_softmax) a.cfg.embed.mode = SkipgramMode::FullSoftmax;
    a.cfg.preprocess = make_preprocess(a.keep_numeric, a.no_fold_accents, a.stopword_path);

    require_path(a.input, "--input");
    require_path(a.out, "--out");
    const Corpus corpus = load_notes(a.input, parse_format(a.format));
    const GridReport report = run_grid(corpus, a.cfg);
    write_text_file(a.out, report.to_csv());
    const std::string table_path = a.table.empty() ? default_table_path(a.out) : a.table;
    const std::string table = report.to_text_table();
    write_text_file(table_path, table);
    std::cout << table << "\nwrote " << a.out << " and " << table_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clinical note classification toolkit"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    synth_cmd->add_option("--n", synth_args.cfg.n_docs, "number of notes");
    synth_cmd->add_option("--len-min", synth_args.cfg.doc_len_min, "minimum tokens per note");
    synth_cmd->add_option("--len-max", synth_args.cfg.doc_len_max, "maximum tokens per note");
    synth_cmd->add_option("--vocab-size", synth_args.cfg.vocab_size, "background vocabulary size");
    synth_cmd->add_option("--signal", synth_args.cfg.signal_strength,
                          "signal word mixture weight in [0,1]");
    synth_cmd->add_option("--pos-fraction", synth_args.cfg.positive_fraction,
                          "fraction of positive notes");
    synth_cmd->add_option("--patients", synth_args.cfg.n_patients, "number of patients");
    synth_cmd->add_option("--providers", synth_args.cfg.n_providers, "number of care providers");
    synth_cmd->add_option("--seed", synth_args.cfg.seed, "PRNG seed");
    synth_cmd->add_option("--out", synth_args.out, "output JSONL path");
    synth_cmd->add_option("--config", synth_args.config_path, "JSON config file");
    synth_cmd->callback([&] { run_synth(synth_cmd, synth_args); });

    PreprocessArgs pre_args;
    auto* pre_cmd = app.add_subcommand("preprocess", "normalize and tokenize notes");
    pre_cmd->add_option("--input", pre_args.input, "notes file");
    pre_cmd->add_option("--output", pre_args.output, "token JSONL path");
    pre_cmd->add_option("--format", pre_args.format, "input format: jsonl or csv");
    pre_cmd->add_option("--stopwords", pre_args.stopword_path, "stopword file (one token per line)");
    pre_cmd->add_flag("--keep-numeric", pre_args.keep_numeric, "keep numeric tokens");
    pre_cmd->add_flag("--no-fold-accents", pre_args.no_fold_accents, "keep accents as typed");
    pre_cmd->add_option("--config", pre_args.config_path, "JSON config file");
    pre_cmd->callback([&] { run_preprocess(pre_cmd, pre_args); });

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "fit a representation + classifier pipeline");
    fit_cmd->add_option("--input", fit_args.input, "labeled notes file");
    fit_cmd->add_option("--output", fit_args.output, "model artifact path");
    fit_cmd->add_option("--format", fit_args.format, "input format: jsonl or csv");
    fit_cmd->add_option("--model", fit_args.cfg.model, "classifier: lr, gnb, or mlp");
    fit_cmd->add_option("--features", fit_args.cfg.features, "representation: bow, tfidf, or embed");
    fit_cmd->add_option("--stopwords", fit_args.stopword_path, "stopword file");
    fit_cmd->add_flag("--keep-numeric", fit_args.keep_numeric, "keep numeric tokens");
    fit_cmd->add_flag("--no-fold-accents", fit_args.no_fold_accents, "keep accents as typed");
    fit_cmd->add_option("--min-df", fit_args.cfg.min_df, "minimum document frequency");
    fit_cmd->add_option("--select-k", fit_args.select_k, "keep the K best features");
    fit_cmd->add_option("--l2", fit_args.cfg.lr.l2, "LR L2 regularization strength");
    fit_cmd->add_option("--lr", fit_args.clf_lr, "classifier learning rate");
    fit_cmd->add_option("--epochs", fit_args.clf_epochs, "classifier training epochs");
    fit_cmd->add_option("--batch", fit_args.cfg.mlp.batch_size, "MLP mini-batch size");
    fit_cmd->add_option("--hidden", fit_args.cfg.mlp.hidden, "MLP hidden layer sizes");
    fit_cmd->add_option("--dim", fit_args.cfg.embed.dim, "embedding dimension");
    fit_cmd->add_option("--window", fit_args.cfg.embed.window, "skip-gram window");
    fit_cmd->add_option("--embed-epochs", fit_args.cfg.embed.epochs, "skip-gram epochs");
    fit_cmd->add_option("--embed-lr", fit_args.cfg.embed.lr, "skip-gram learning rate");
    fit_cmd->add_option("--neg", fit_args.cfg.embed.neg_k, "negative samples per pair");
    fit_cmd->add_flag("--full-softmax", fit_args.full_softmax, "exact softmax skip-gram");
    fit_cmd->add_option("--var-smoothing", fit_args.cfg.var_smoothing, "GNB variance smoothing");
    fit_cmd->add_option("--threshold", fit_args.cfg.threshold, "decision threshold");
    fit_cmd->add_option("--seed", fit_args.cfg.seed, "PRNG seed");
    fit_cmd->add_option("--config", fit_args.config_path, "JSON config file");
    fit_cmd->callback([&] { run_fit(fit_cmd, fit_args); });

    PredictArgs pred_args;
    auto* pred_cmd = app.add_subcommand("predict", "score notes with a fitted model");
    pred_cmd->add_option("--model", pred_args.model_path, "model artifact path");
    pred_cmd->add_option("--input", pred_args.input, "notes file");
    pred_cmd->add_option("--output", pred_args.output, "predictions CSV path");
    pred_cmd->add_option("--format", pred_args.format, "input format: jsonl or csv");
    pred_cmd->add_option("--threshold", pred_args.threshold, "override decision threshold");
    pred_cmd->add_option("--config", pred_args.config_path, "JSON config file");
    pred_cmd->callback([&] { run_predict(pred_cmd, pred_args); });

    GridArgs grid_args;
    auto* grid_cmd = app.add_subcommand(
        "grid", "run the representation x classifier x selection experiment grid");
    grid_cmd->add_option("--input", grid_args.input, "labeled notes file");
    grid_cmd->add_option("--format", grid_args.format, "input format: jsonl or csv");
    grid_cmd->add_option("--k", grid_args.cfg.k, "number of CV folds");
    grid_cmd->add_option("--seed", grid_args.cfg.seed, "PRNG seed");
    grid_cmd->add_option("--select-k", grid_args.select_k, "K for the selection cells");
    grid_cmd->add_option("--min-df", grid_args.cfg.min_df, "minimum document frequency");
    grid_cmd->add_option("--out", grid_args.out, "CSV report path");
    grid_cmd->add_option("--table", grid_args.table, "text table path (default: out with .txt)");
    grid_cmd->add_option("--stopwords", grid_args.stopword_path, "stopword file");
    grid_cmd->add_flag("--keep-numeric", grid_args.keep_numeric, "keep numeric tokens");
    grid_cmd->add_flag("--no-fold-accents", grid_args.no_fold_accents, "keep accents as typed");
    grid_cmd->add_option("--dim", grid_args.cfg.embed.dim, "embedding dimension");
    grid_cmd->add_option("--window", grid_args.cfg.embed.window, "skip-gram window");
    grid_cmd->add_option("--embed-epochs", grid_args.cfg.embed.epochs, "skip-gram epochs");
    grid_cmd->add_option("--embed-lr", grid_args.cfg.embed.lr, "skip-gram learning rate");
    grid_cmd->add_option("--neg", grid_args.cfg.embed.neg_k, "negative samples per pair");
    grid_cmd->add_flag("--full-softmax", grid_args.full_softmax, "exact softmax skip-gram");
    grid_cmd->add_option("--l2", grid_args.cfg.lr.l2, "LR L2 regularization strength");
    grid_cmd->add_option("--lr-epochs", grid_args.cfg.lr.epochs, "LR training epochs");
    grid_cmd->add_option("--mlp-epochs", grid_args.cfg.mlp.epochs, "MLP training epochs");
    grid_cmd->add_option("--batch", grid_args.cfg.mlp.batch_size, "MLP mini-batch size");
    grid_cmd->add_option("--hidden", grid_args.cfg.mlp.hidden, "MLP hidden layer sizes");
    grid_cmd->add_option("--var-smoothing", grid_args.cfg.var_smoothing, "GNB variance smoothing");
    grid_cmd->add_option("--threshold", grid_args.cfg.threshold, "decision threshold");
    grid_cmd->add_option("--config", grid_args.config_path, "JSON config file");
    grid_cmd->callback([&] { run_grid_cmd(grid_cmd, grid_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const notecls::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const notecls::MalformedRecord& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const notecls::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
