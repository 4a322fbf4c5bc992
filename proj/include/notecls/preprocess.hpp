#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "notecls/corpus.hpp"

namespace notecls {

// Normalized token sequence for one note. Every token is non-empty,
// lowercase, and not in the active stoplist.
struct TokenDoc {
    std::string note_id;
    std::vector<std::string> tokens;
    Label label = Label::Unlabeled;
};

// Lowercases all cased letters (ASCII and Latin-1/Extended-A) and, when
// fold_accents is set, maps Latin diacritics to base letters (e -> e, c -> c,
// oe ligature -> "oe"). Input and output are UTF-8.
std::string normalize(const std::string& text, bool fold_accents);

// Splits normalized text into maximal runs of letters/digits. Intra-word
// hyphens are kept ("pro-bnp" stays one token); '.' and ',' continue a token
// only between digits; everything else separates. When drop_numeric, tokens
// made of digits and './,/%' only are removed.
std::vector<std::string> tokenize(const std::string& text, bool drop_numeric);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist);

// One token per line, UTF-8, '#' starts a comment. Entries are returned raw;
// build_stoplist normalizes them so they match pipeline output.
std::vector<std::string> load_stopword_file(const std::string& path);

// Built-in French list, same content as data/stopwords_fr.txt.
const std::vector<std::string>& default_french_stopwords();

struct PreprocessOptions {
    bool fold_accents = true;
    bool drop_numeric = true;
    // raw stoplist entries; nullopt -> built-in French list, an empty list
    // disables stopword removal entirely
    std::optional<std::vector<std::string>> stopwords;
};

// Normalizes stoplist entries under the same options as document text, so
// accented entries match folded tokens.
std::unordered_set<std::string> build_stoplist(const PreprocessOptions& opts);

TokenDoc preprocess_note(const Note& note, const PreprocessOptions& opts,
                         const std::unordered_set<std::string>& stoplist);

std::vector<TokenDoc> preprocess_corpus(const Corpus& corpus, const PreprocessOptions& opts);

} // namespace notecls
