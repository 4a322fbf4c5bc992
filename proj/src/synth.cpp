#include "notecls/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "notecls/preprocess.hpp"
#include "notecls/rng.hpp"

namespace notecls {

namespace {

// Cardiac-positive markers: common paediatric cardiology abbreviations and
// the drugs/measures a cardiac note would mention.
const std::vector<std::string> kPositiveSignal = {
    "milri", "cec", "cia", "civ", "fc", "aorte", "aortique", "valve",
};

// Markers typical of non-cardiac (respiratory / routine) notes.
const std::vector<std::string> kNegativeSignal = {
    "ivrs", "sop", "po", "eupneique", "afebrile", "stable",
};

std::string background_token(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%04d", index);
    return buf;
}

} // namespace

const std::vector<std::string>& default_positive_signal_words() { return kPositiveSignal; }
const std::vector<std::string>& default_negative_signal_words() { return kNegativeSignal; }

Corpus generate_corpus(const SynthConfig& cfg) {
    if (cfg.n_docs < 0) throw InvalidConfig("n_docs must be >= 0");
    if (cfg.doc_len_min < 1 || cfg.doc_len_min > cfg.doc_len_max)
        throw InvalidConfig("doc length range must satisfy 1 <= min <= max");
    if (cfg.vocab_size < 1) throw InvalidConfig("vocab_size must be >= 1");
    if (cfg.signal_strength < 0.0 || cfg.signal_strength > 1.0)
        throw InvalidConfig("signal_strength must be in [0, 1]");
    if (cfg.positive_fraction <= 0.0 || cfg.positive_fraction >= 1.0)
        throw InvalidConfig("positive_fraction must be in (0, 1)");
    if (cfg.n_patients < 1 || cfg.n_providers < 1)
        throw InvalidConfig("n_patients and n_providers must be >= 1");

    const auto& pos_words = cfg.signal_words_pos.empty() ? kPositiveSignal : cfg.signal_words_pos;
    const auto& neg_words = cfg.signal_words_neg.empty() ? kNegativeSignal : cfg.signal_words_neg;
    {
        std::unordered_set<std::string> pos_set(pos_words.begin(), pos_words.end());
        for (const auto& w : neg_words)
            if (pos_set.count(w))
                throw InvalidConfig("signal word lists must be disjoint: " + w);
    }

    // filler words give the stopword filter something to remove
    const std::vector<std::string>& fillers = default_french_stopwords();

    // exact positive count, shuffled across note indices
    std::vector<int> labels(static_cast<std::size_t>(cfg.n_docs), 0);
    const long n_pos = std::lround(cfg.positive_fraction * cfg.n_docs);
    for (long i = 0; i < n_pos && i < cfg.n_docs; ++i) labels[static_cast<std::size_t>(i)] = 1;
    Rng rng(derive_seed(cfg.seed, {"synth"}));
    rng.shuffle(labels);

    Corpus corpus;
    corpus.notes.reserve(static_cast<std::size_t>(cfg.n_docs));
    for (int i = 0; i < cfg.n_docs; ++i) {
        Note note;
        char buf[24];
        std::snprintf(buf, sizeof(buf), "n%05d", i);
        note.id = buf;
        const int patient = i % cfg.n_patients;
        std::snprintf(buf, sizeof(buf), "p%04d", patient);
        note.patient_id = buf;
        // providers cover contiguous patient blocks, so each patient has one
        // provider and groups stay well-separated
        const int provider =
            static_cast<int>(static_cast<long>(patient) * cfg.n_providers / cfg.n_patients);
        std::snprintf(buf, sizeof(buf), "d%03d", provider);
        note.provider_id = buf;
        note.stay_index = 1;
        note.label = labels[static_cast<std::size_t>(i)] == 1 ? Label::Positive : Label::Negative;

        const auto& signal = labels[static_cast<std::size_t>(i)] == 1 ? pos_words : neg_words;
        const int len = cfg.doc_len_min +
                        static_cast<int>(rng.bounded(
                            static_cast<std::uint64_t>(cfg.doc_len_max - cfg.doc_len_min + 1)));
        std::string text;
        for (int t = 0; t < len; ++t) {
            if (t > 0) text.push_back(' ');
            if (rng.uniform() < cfg.signal_strength) {
                text += signal[rng.bounded(signal.size())];
            } else if (rng.uniform() < 0.25) {
                text += fillers[rng.bounded(fillers.size())];
            } else {
                text += background_token(
                    static_cast<int>(rng.bounded(static_cast<std::uint64_t>(cfg.vocab_size))));
            }
        }
        note.text = std::move(text);
        corpus.notes.push_back(std::move(note));
    }
    return corpus;
}

} // namespace notecls
