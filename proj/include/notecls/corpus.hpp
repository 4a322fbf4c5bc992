#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "notecls/errors.hpp"

namespace notecls {

enum class Label { Positive, Negative, Unlabeled };

const char* to_string(Label label);
Label label_from_string(const std::string& s);

// One clinical document with identity, grouping keys, text, and binary label.
struct Note {
    std::string id;
    std::string patient_id;
    std::string provider_id;
    int stay_index = 1;
    std::optional<double> hours_since_admission;
    std::string text;
    Label label = Label::Unlabeled;
};

// Ordered list of notes; ordering is load order, duplicate ids rejected at load.
struct Corpus {
    std::vector<Note> notes;

    std::size_t size() const { return notes.size(); }
    bool empty() const { return notes.empty(); }
};

enum class CorpusFormat { Jsonl, Csv };

// Reads one Note per record. Unknown fields are ignored; a missing label
// parses as Unlabeled. Throws MalformedRecord (with the 1-based line number)
// on unparsable input and DuplicateId on a repeated id.
Corpus load_notes(const std::string& path, CorpusFormat format);

void save_notes_jsonl(const Corpus& corpus, const std::string& path);
void save_notes_csv(const Corpus& corpus, const std::string& path);

// Retains only notes from a patient's first stay within the first 24 hours:
// stay_index == 1 and hours_since_admission absent or <= 24.
Corpus first_stay_filter(const Corpus& corpus);

// Group unit for contamination-free splitting: notes sharing a patient_id or
// a provider_id (transitively) belong to the same component. Returns one
// component id per note, numbered densely in first-seen order.
std::vector<int> contamination_components(const Corpus& corpus);

// Splits into (train, test) so that no patient_id and no provider_id appears
// on both sides. Components are shuffled by the seeded PRNG and greedily
// assigned to the test side until round(test_fraction * n) is met or
// exceeded. Deterministic for a given seed.
std::pair<Corpus, Corpus> split_disjoint(const Corpus& corpus, double test_fraction,
                                         std::uint64_t seed);

// Throws ContaminationError if the two partitions share a patient_id or a
// provider_id.
void verify_disjoint_partitions(const Corpus& train, const Corpus& test);

} // namespace notecls
