#include "notecls/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "notecls/rng.hpp"

namespace notecls {

using nlohmann::json;

const char* to_string(Label label) {
    switch (label) {
        case Label::Positive: return "Positive";
        case Label::Negative: return "Negative";
        case Label::Unlabeled: return "Unlabeled";
    }
    return "Unlabeled";
}

Label label_from_string(const std::string& s) {
    if (s == "Positive") return Label::Positive;
    if (s == "Negative") return Label::Negative;
    if (s == "Unlabeled" || s.empty()) return Label::Unlabeled;
    throw InvalidArgument("unknown label: " + s);
}

namespace {

Note note_from_json(const json& j, std::size_t line_no) {
    auto require_string = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string())
            throw MalformedRecord(line_no, std::string("missing or non-string \"") + key + "\"");
        return it->get<std::string>();
    };
    Note note;
    note.id = require_string("id");
    note.patient_id = require_string("patient_id");
    note.provider_id = require_string("provider_id");
    note.text = require_string("text");
    if (auto it = j.find("stay_index"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 1)
            throw MalformedRecord(line_no, "stay_index must be an integer >= 1");
        note.stay_index = it->get<int>();
    }
    if (auto it = j.find("hours_since_admission"); it != j.end() && !it->is_null()) {
        if (!it->is_number() || it->get<double>() < 0.0)
            throw MalformedRecord(line_no, "hours_since_admission must be a number >= 0");
        note.hours_since_admission = it->get<double>();
    }
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw MalformedRecord(line_no, "label must be a string");
        const std::string s = it->get<std::string>();
        if (s == "Positive")
            note.label = Label::Positive;
        else if (s == "Negative")
            note.label = Label::Negative;
        else
            throw MalformedRecord(line_no, "label must be \"Positive\" or \"Negative\"");
    }
    return note;
}

Corpus load_jsonl(std::istream& in) {
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw MalformedRecord(line_no, e.what());
        }
        if (!j.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");
        Note note = note_from_json(j, line_no);
        if (!seen_ids.insert(note.id).second) throw DuplicateId(note.id);
        corpus.notes.push_back(std::move(note));
    }
    return corpus;
}

// Splits one CSV line into fields, honoring double-quoted fields with ""
// escapes. The text column is last and may contain quoted commas.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            if (!cur.empty()) throw MalformedRecord(line_no, "quote inside unquoted field");
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) throw MalformedRecord(line_no, "unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

const char* kCsvHeader = "id,patient_id,provider_id,stay_index,hours_since_admission,label,text";

Corpus load_csv(std::istream& in) {
    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return corpus;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw MalformedRecord(line_no, std::string("expected header \"") + kCsvHeader + "\"");
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != 7)
            throw MalformedRecord(line_no, "expected 7 columns, got " + std::to_string(fields.size()));
        Note note;
        note.id = fields[0];
        note.patient_id = fields[1];
        note.provider_id = fields[2];
        if (!fields[3].empty()) {
            try {
                note.stay_index = std::stoi(fields[3]);
            } catch (const std::exception&) {
                throw MalformedRecord(line_no, "bad stay_index: " + fields[3]);
            }
            if (note.stay_index < 1) throw MalformedRecord(line_no, "stay_index must be >= 1");
        }
        if (!fields[4].empty()) {
            try {
                note.hours_since_admission = std::stod(fields[4]);
            } catch (const std::exception&) {
                throw MalformedRecord(line_no, "bad hours_since_admission: " + fields[4]);
            }
            if (*note.hours_since_admission < 0.0)
                throw MalformedRecord(line_no, "hours_since_admission must be >= 0");
        }
        if (!fields[5].empty()) {
            if (fields[5] != "Positive" && fields[5] != "Negative")
                throw MalformedRecord(line_no, "label must be \"Positive\" or \"Negative\"");
            note.label = fields[5] == "Positive" ? Label::Positive : Label::Negative;
        }
        note.text = fields[6];
        if (note.id.empty()) throw MalformedRecord(line_no, "empty id");
        if (!seen_ids.insert(note.id).second) throw DuplicateId(note.id);
        corpus.notes.push_back(std::move(note));
    }
    return corpus;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

json note_to_json(const Note& note) {
    json j;
    j["id"] = note.id;
    j["patient_id"] = note.patient_id;
    j["provider_id"] = note.provider_id;
    j["stay_index"] = note.stay_index;
    if (note.hours_since_admission) j["hours_since_admission"] = *note.hours_since_admission;
    j["text"] = note.text;
    if (note.label != Label::Unlabeled) j["label"] = to_string(note.label);
    return j;
}

// Union-find over note indices.
struct DisjointSet {
    std::vector<int> parent;

    explicit DisjointSet(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

Corpus load_notes(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return format == CorpusFormat::Jsonl ? load_jsonl(in) : load_csv(in);
}

void save_notes_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const Note& note : corpus.notes) out << note_to_json(note).dump() << '\n';
}

void save_notes_csv(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17); // hours round-trip exactly
    out << kCsvHeader << '\n';
    for (const Note& note : corpus.notes) {
        out << csv_escape(note.id) << ',' << csv_escape(note.patient_id) << ','
            << csv_escape(note.provider_id) << ',' << note.stay_index << ',';
        if (note.hours_since_admission) out << *note.hours_since_admission;
        out << ',' << (note.label == Label::Unlabeled ? "" : to_string(note.label)) << ','
            << csv_escape(note.text) << '\n';
    }
}

Corpus first_stay_filter(const Corpus& corpus) {
    Corpus out;
    for (const Note& note : corpus.notes) {
        if (note.stay_index != 1) continue;
        if (note.hours_since_admission && *note.hours_since_admission > 24.0) continue;
        out.notes.push_back(note);
    }
    return out;
}

std::vector<int> contamination_components(const Corpus& corpus) {
    const std::size_t n = corpus.size();
    DisjointSet ds(n);
    std::unordered_map<std::string, int> first_patient, first_provider;
    for (std::size_t i = 0; i < n; ++i) {
        const Note& note = corpus.notes[i];
        auto [pit, pnew] = first_patient.try_emplace(note.patient_id, static_cast<int>(i));
        if (!pnew) ds.unite(pit->second, static_cast<int>(i));
        auto [cit, cnew] = first_provider.try_emplace(note.provider_id, static_cast<int>(i));
        if (!cnew) ds.unite(cit->second, static_cast<int>(i));
    }
    std::vector<int> component(n, -1);
    std::unordered_map<int, int> root_to_id;
    int next_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int root = ds.find(static_cast<int>(i));
        auto [it, inserted] = root_to_id.try_emplace(root, next_id);
        if (inserted) ++next_id;
        component[i] = it->second;
    }
    return component;
}

std::pair<Corpus, Corpus> split_disjoint(const Corpus& corpus, double test_fraction,
                                         std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InvalidArgument("test_fraction must be in (0, 1)");
    std::unordered_set<std::string> patients, providers;
    for (const Note& note : corpus.notes) {
        patients.insert(note.patient_id);
        providers.insert(note.provider_id);
    }
    if (patients.size() < 2 || providers.size() < 2)
        throw InsufficientGroups("need at least 2 distinct patient and 2 distinct provider groups");

    const std::vector<int> component = contamination_components(corpus);
    const int n_components = 1 + *std::max_element(component.begin(), component.end());
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(n_components));
    for (std::size_t i = 0; i < component.size(); ++i)
        members[static_cast<std::size_t>(component[i])].push_back(i);

    std::vector<int> order(static_cast<std::size_t>(n_components));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {"split_disjoint"}));
    rng.shuffle(order);

    const std::size_t target =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(corpus.size())));
    std::vector<bool> to_test(static_cast<std::size_t>(n_components), false);
    std::size_t test_size = 0;
    for (int comp : order) {
        if (test_size >= target) break;
        to_test[static_cast<std::size_t>(comp)] = true;
        test_size += members[static_cast<std::size_t>(comp)].size();
    }

    Corpus train, test;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (to_test[static_cast<std::size_t>(component[i])])
            test.notes.push_back(corpus.notes[i]);
        else
            train.notes.push_back(corpus.notes[i]);
    }
    if (train.empty() || test.empty())
        throw UnsatisfiableSplit("patient/provider constraints force one partition empty");
    verify_disjoint_partitions(train, test);
    return {std::move(train), std::move(test)};
}

void verify_disjoint_partitions(const Corpus& train, const Corpus& test) {
    std::unordered_set<std::string> train_patients, train_providers;
    for (const Note& note : train.notes) {
        train_patients.insert(note.patient_id);
        train_providers.insert(note.provider_id);
    }
    for (const Note& note : test.notes) {
        if (train_patients.count(note.patient_id))
            throw ContaminationError("patient_id " + note.patient_id + " appears in both partitions");
        if (train_providers.count(note.provider_id))
            throw ContaminationError("provider_id " + note.provider_id + " appears in both partitions");
    }
}

} // namespace notecls
