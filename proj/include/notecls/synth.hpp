#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notecls/corpus.hpp"

namespace notecls {

// Seeded generator of labeled pseudo-clinical corpora. Each note mixes a
// background token distribution with its class's signal-word list at weight
// signal_strength, so the class signal is plantable and tunable down to zero.
struct SynthConfig {
    int n_docs = 600;
    int doc_len_min = 30;
    int doc_len_max = 80;
    int vocab_size = 1500; // background tokens w0001..
    std::vector<std::string> signal_words_pos; // empty -> built-in defaults
    std::vector<std::string> signal_words_neg;
    double signal_strength = 0.7;
    double positive_fraction = 0.5;
    int n_patients = 150;
    int n_providers = 25;
    std::uint64_t seed = 1;
};

const std::vector<std::string>& default_positive_signal_words();
const std::vector<std::string>& default_negative_signal_words();

// Deterministic for a fixed config. Labels match the generating class;
// patient ids are assigned round-robin and provider ids cover contiguous
// patient blocks, so the corpus always has multiple disjoint groups.
Corpus generate_corpus(const SynthConfig& cfg);

} // namespace notecls
