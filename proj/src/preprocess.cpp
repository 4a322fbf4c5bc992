#include "notecls/preprocess.hpp"

#include <fstream>

namespace notecls {

namespace {

using CodePoint = char32_t;

// Lenient UTF-8 decoder: invalid sequences come back as U+FFFD, which the
// tokenizer treats as a separator.
std::vector<CodePoint> decode_utf8(const std::string& s) {
    std::vector<CodePoint> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b0 = static_cast<unsigned char>(s[i]);
        CodePoint cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size() &&
                   (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80) {
            cp = static_cast<CodePoint>((b0 & 0x1F) << 6 |
                                        (static_cast<unsigned char>(s[i + 1]) & 0x3F));
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size() &&
                   (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80 &&
                   (static_cast<unsigned char>(s[i + 2]) & 0xC0) == 0x80) {
            cp = static_cast<CodePoint>((b0 & 0x0F) << 12 |
                                        (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 6 |
                                        (static_cast<unsigned char>(s[i + 2]) & 0x3F));
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size() &&
                   (static_cast<unsigned char>(s[i + 1]) & 0xC0) == 0x80 &&
                   (static_cast<unsigned char>(s[i + 2]) & 0xC0) == 0x80 &&
                   (static_cast<unsigned char>(s[i + 3]) & 0xC0) == 0x80) {
            cp = static_cast<CodePoint>((b0 & 0x07) << 18 |
                                        (static_cast<unsigned char>(s[i + 1]) & 0x3F) << 12 |
                                        (static_cast<unsigned char>(s[i + 2]) & 0x3F) << 6 |
                                        (static_cast<unsigned char>(s[i + 3]) & 0x3F));
            len = 4;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void encode_utf8(CodePoint cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Covers ASCII, Latin-1 supplement, and Latin Extended-A; everything the
// French notes need. Other scripts pass through unchanged.
CodePoint to_lower(CodePoint cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

// Folds a lowercase code point to its base letter(s); empty means "no
// mapping, keep as is". Ligatures expand (oe ligature -> "oe").
const char* fold_accent(CodePoint cp) {
    switch (cp) {
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5:
        case 0x101: case 0x103: case 0x105: return "a";
        case 0xE6: return "ae";
        case 0xE7: case 0x107: case 0x109: case 0x10B: case 0x10D: return "c";
        case 0xF0: case 0x10F: case 0x111: return "d";
        case 0xE8: case 0xE9: case 0xEA: case 0xEB:
        case 0x113: case 0x115: case 0x117: case 0x119: case 0x11B: return "e";
        case 0x11D: case 0x11F: case 0x121: case 0x123: return "g";
        case 0x125: case 0x127: return "h";
        case 0xEC: case 0xED: case 0xEE: case 0xEF:
        case 0x129: case 0x12B: case 0x12D: case 0x12F: case 0x131: return "i";
        case 0x135: return "j";
        case 0x137: return "k";
        case 0x13A: case 0x13C: case 0x13E: case 0x140: case 0x142: return "l";
        case 0xF1: case 0x144: case 0x146: case 0x148: return "n";
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8:
        case 0x14D: case 0x14F: case 0x151: return "o";
        case 0x153: return "oe";
        case 0x155: case 0x157: case 0x159: return "r";
        case 0x15B: case 0x15D: case 0x15F: case 0x161: return "s";
        case 0x163: case 0x165: case 0x167: return "t";
        case 0xF9: case 0xFA: case 0xFB: case 0xFC:
        case 0x169: case 0x16B: case 0x16D: case 0x16F: case 0x171: case 0x173: return "u";
        case 0x175: return "w";
        case 0xFD: case 0xFF: case 0x177: return "y";
        case 0x17A: case 0x17C: case 0x17E: return "z";
        default: return nullptr;
    }
}

bool is_letter(CodePoint cp) {
    if (cp >= 'a' && cp <= 'z') return true;
    if (cp >= 'A' && cp <= 'Z') return true;
    if (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7) return true;
    return cp >= 0x370 && cp != 0xFFFD;
}

bool is_digit(CodePoint cp) { return cp >= '0' && cp <= '9'; }

bool is_alnum(CodePoint cp) { return is_letter(cp) || is_digit(cp); }

bool is_numeric_token(const std::string& token) {
    bool has_digit = false;
    for (CodePoint cp : decode_utf8(token)) {
        if (is_digit(cp)) {
            has_digit = true;
        } else if (cp != '.' && cp != ',' && cp != '%') {
            return false;
        }
    }
    return has_digit;
}

const char* const kFrenchStopwords[] = {
    "le", "la", "les", "un", "une", "des", "du", "de", "d", "l", "au", "aux", "à",
    "en", "y", "il", "elle", "ils", "elles", "on", "je", "tu", "nous", "vous",
    "se", "sa", "son", "ses", "leur", "leurs", "mon", "ma", "mes", "ton", "ta",
    "tes", "notre", "votre", "nos", "vos", "ce", "cet", "cette", "ces", "qui",
    "que", "quoi", "dont", "où", "et", "ou", "mais", "donc", "or", "ni", "car",
    "ne", "n", "pas", "plus", "moins", "très", "trop", "peu", "assez", "aussi",
    "encore", "déjà", "jamais", "toujours", "souvent", "parfois", "ici", "là",
    "avec", "sans", "sous", "sur", "dans", "entre", "vers", "chez", "par",
    "pour", "contre", "avant", "après", "pendant", "depuis", "dès", "jusque",
    "est", "sont", "était", "étaient", "été", "être", "suis", "es", "sommes",
    "êtes", "sera", "seront", "serait", "seraient", "soit", "étant", "a", "ai",
    "as", "avons", "avez", "ont", "avait", "avaient", "aura", "auront", "eu",
    "avoir", "ayant", "fait", "faire", "fais", "faisait", "peut", "peuvent",
    "pouvait", "pu", "pouvoir", "doit", "doivent", "devait", "dû", "devoir",
    "va", "vont", "allait", "aller", "si", "alors", "ainsi", "comme", "quand",
    "lorsque", "puisque", "parce", "cela", "ça", "ceci", "celui", "celle",
    "ceux", "celles", "même", "mêmes", "autre", "autres", "tout", "toute",
    "tous", "toutes", "quel", "quelle", "quels", "quelles", "rien", "personne",
    "aucun", "aucune", "chaque", "plusieurs", "certains", "certaines", "tel",
    "telle", "tels", "telles", "afin", "selon", "malgré", "hors", "sauf",
};

} // namespace

std::string normalize(const std::string& text, bool fold_accents) {
    std::string out;
    out.reserve(text.size());
    for (CodePoint cp : decode_utf8(text)) {
        CodePoint lower = to_lower(cp);
        if (fold_accents) {
            if (const char* base = fold_accent(lower)) {
                out += base;
                continue;
            }
        }
        encode_utf8(lower, out);
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& text, bool drop_numeric) {
    const std::vector<CodePoint> cps = decode_utf8(text);
    std::vector<std::string> tokens;
    std::string cur;
    bool cur_last_alnum = false;

    auto flush = [&] {
        if (!cur.empty() && !(drop_numeric && is_numeric_token(cur)))
            tokens.push_back(cur);
        cur.clear();
        cur_last_alnum = false;
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        CodePoint cp = cps[i];
        if (is_alnum(cp)) {
            encode_utf8(cp, cur);
            cur_last_alnum = true;
        } else if (cp == '-' && cur_last_alnum && i + 1 < cps.size() && is_alnum(cps[i + 1])) {
            cur.push_back('-');
            cur_last_alnum = false;
        } else if ((cp == '.' || cp == ',') && !cur.empty() && i + 1 < cps.size() &&
                   is_digit(cps[i - 1]) && is_digit(cps[i + 1])) {
            cur.push_back(static_cast<char>(cp));
            cur_last_alnum = false;
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens)
        if (!stoplist.count(t)) out.push_back(t);
    return out;
}

std::vector<std::string> load_stopword_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open stopword file " + path);
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        entries.push_back(line.substr(start));
    }
    return entries;
}

const std::vector<std::string>& default_french_stopwords() {
    static const std::vector<std::string> list(std::begin(kFrenchStopwords),
                                               std::end(kFrenchStopwords));
    return list;
}

std::unordered_set<std::string> build_stoplist(const PreprocessOptions& opts) {
    const std::vector<std::string>& entries =
        opts.stopwords ? *opts.stopwords : default_french_stopwords();
    std::unordered_set<std::string> stoplist;
    for (const std::string& entry : entries) {
        for (const std::string& tok : tokenize(normalize(entry, opts.fold_accents), false))
            stoplist.insert(tok);
    }
    return stoplist;
}

TokenDoc preprocess_note(const Note& note, const PreprocessOptions& opts,
                         const std::unordered_set<std::string>& stoplist) {
    TokenDoc doc;
    doc.note_id = note.id;
    doc.label = note.label;
    doc.tokens = remove_stopwords(tokenize(normalize(note.text, opts.fold_accents),
                                           opts.drop_numeric),
                                  stoplist);
    return doc;
}

std::vector<TokenDoc> preprocess_corpus(const Corpus& corpus, const PreprocessOptions& opts) {
    const auto stoplist = build_stoplist(opts);
    std::vector<TokenDoc> docs;
    docs.reserve(corpus.size());
    for (const Note& note : corpus.notes) docs.push_back(preprocess_note(note, opts, stoplist));
    return docs;
}

} // namespace notecls
