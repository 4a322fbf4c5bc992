#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "notecls/corpus.hpp"

using namespace notecls;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
    fs::path dir = fs::temp_directory_path() / "notecls_test_cli";
    fs::create_directories(dir);
    return dir;
}

// Runs the CLI binary; returns the process exit code.
int run(const std::string& args) {
    const std::string cmd = std::string(NOTECLS_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

} // namespace

TEST_CASE("synth writes a parsable deterministic corpus") {
    const fs::path dir = work_dir();
    const fs::path out1 = dir / "synth1.jsonl";
    const fs::path out2 = dir / "synth2.jsonl";
    REQUIRE(run("synth --n 40 --seed 9 --patients 10 --providers 4 --out " + q(out1)) == 0);
    REQUIRE(run("synth --n 40 --seed 9 --patients 10 --providers 4 --out " + q(out2)) == 0);
    CHECK(slurp(out1) == slurp(out2));

    Corpus c = load_notes(out1.string(), CorpusFormat::Jsonl);
    CHECK(c.size() == 40);
    CHECK(c.notes[0].label != Label::Unlabeled);
}

TEST_CASE("preprocess handles empty input, flags, and bad paths") {
    const fs::path dir = work_dir();
    const fs::path empty_in = dir / "empty.jsonl";
    const fs::path empty_out = dir / "empty_tokens.jsonl";
    write_file(empty_in, "");
    CHECK(run("preprocess --input " + q(empty_in) + " --output " + q(empty_out)) == 0);
    CHECK(slurp(empty_out).empty());

    CHECK(run("preprocess --input /nonexistent/in.jsonl --output " + q(dir / "x.jsonl")) == 2);

    const fs::path notes = dir / "numeric.jsonl";
    write_file(notes,
        R"({"id":"a","patient_id":"p","provider_id":"d","text":"pro-BNP 1200 ng/l","label":"Positive"})" "\n");
    const fs::path toks_drop = dir / "toks_drop.jsonl";
    const fs::path toks_keep = dir / "toks_keep.jsonl";
    REQUIRE(run("preprocess --input " + q(notes) + " --output " + q(toks_drop)) == 0);
    REQUIRE(run("preprocess --input " + q(notes) + " --keep-numeric --output " + q(toks_keep)) == 0);
    json dropped = json::parse(slurp(toks_drop));
    json kept = json::parse(slurp(toks_keep));
    auto has = [](const json& j, const std::string& tok) {
        for (const auto& t : j.at("tokens"))
            if (t.get<std::string>() == tok) return true;
        return false;
    };
    CHECK(!has(dropped, "1200"));
    CHECK(has(kept, "1200"));
    CHECK(has(dropped, "pro-bnp"));
}

TEST_CASE("preprocess accepts csv input") {
    const fs::path dir = work_dir();
    const fs::path csv = dir / "notes.csv";
    write_file(csv,
               "id,patient_id,provider_id,stay_index,hours_since_admission,label,text\n"
               "a,p1,d1,1,,Positive,\"valve aortique, FE 45%\"\n");
    const fs::path out = dir / "csv_tokens.jsonl";
    REQUIRE(run("preprocess --format csv --input " + q(csv) + " --output " + q(out)) == 0);
    json doc = json::parse(slurp(out));
    CHECK(doc.at("label").get<std::string>() == "Positive");
    CHECK(doc.at("tokens").size() == 3); // valve aortique fe
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("preprocess --output only.jsonl") == 2); // missing required --input
    CHECK(run("no-such-command") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("fit and predict round trip on a separable corpus") {
    const fs::path dir = work_dir();
    const fs::path notes = dir / "train.jsonl";
    const fs::path model = dir / "model.json";
    const fs::path preds = dir / "preds.csv";
    REQUIRE(run("synth --n 80 --signal 0.9 --seed 4 --patients 20 --providers 5 --vocab-size 200 --out " +
                q(notes)) == 0);
    REQUIRE(run("fit --model lr --features tfidf --input " + q(notes) + " --output " + q(model) +
                " --epochs 200 --seed 2") == 0);
    const fs::path model2 = dir / "model2.json";
    REQUIRE(run("fit --model lr --features tfidf --input " + q(notes) + " --output " + q(model2) +
                " --epochs 200 --seed 2") == 0);
    CHECK(slurp(model) == slurp(model2));
    REQUIRE(run("predict --model " + q(model) + " --input " + q(notes) + " --output " + q(preds)) == 0);

    Corpus c = load_notes(notes.string(), CorpusFormat::Jsonl);
    std::istringstream in(slurp(preds));
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,probability,label");
    std::size_t right = 0, total = 0;
    std::string line;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        REQUIRE(c1 != std::string::npos);
        const std::string id = line.substr(0, c1);
        const std::string label = line.substr(c2 + 1);
        for (const Note& n : c.notes)
            if (n.id == id) {
                ++total;
                if (label == to_string(n.label)) ++right;
            }
    }
    CHECK(total == 80);
    // training-set predictions on a 0.9-signal corpus should match the labels
    CHECK(right == total);
}

TEST_CASE("embedding pipeline round trips through fit and predict") {
    const fs::path dir = work_dir();
    const fs::path notes = dir / "embed_train.jsonl";
    const fs::path model = dir / "embed_model.json";
    const fs::path preds = dir / "embed_preds.csv";
    REQUIRE(run("synth --n 60 --signal 0.9 --seed 6 --patients 15 --providers 5 --vocab-size 80 "
                "--len-min 15 --len-max 25 --out " + q(notes)) == 0);
    REQUIRE(run("fit --model gnb --features embed --input " + q(notes) + " --output " + q(model) +
                " --dim 16 --embed-epochs 3 --select-k 10 --seed 2") == 0);
    REQUIRE(run("predict --model " + q(model) + " --input " + q(notes) + " --output " + q(preds)) == 0);

    std::istringstream in(slurp(preds));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 60);

    // forcing the threshold to 0 makes every prediction positive
    const fs::path all_pos = dir / "all_pos.csv";
    REQUIRE(run("predict --model " + q(model) + " --input " + q(notes) + " --threshold 0 "
                "--output " + q(all_pos)) == 0);
    CHECK(slurp(all_pos).find("Negative") == std::string::npos);
}

TEST_CASE("predict rejects missing and version-mismatched models") {
    const fs::path dir = work_dir();
    const fs::path notes = dir / "p.jsonl";
    write_file(notes,
        R"({"id":"a","patient_id":"p","provider_id":"d","text":"civ cec","label":"Positive"})" "\n");
    CHECK(run("predict --model /nonexistent/model.json --input " + q(notes) + " --output " +
              q(dir / "o.csv")) == 2);

    const fs::path bad_model = dir / "bad_model.json";
    write_file(bad_model, R"({"version": 999, "model_type": "lr"})");
    CHECK(run("predict --model " + q(bad_model) + " --input " + q(notes) + " --output " +
              q(dir / "o2.csv")) == 1);
}

TEST_CASE("grid emits 18 rows, twice identically, and validates select-k") {
    const fs::path dir = work_dir();
    const fs::path notes = dir / "grid_notes.jsonl";
    REQUIRE(run("synth --n 60 --signal 0.8 --seed 3 --patients 20 --providers 10 "
                "--vocab-size 120 --len-min 15 --len-max 30 --out " + q(notes)) == 0);

    const std::string grid_flags =
        " --k 3 --seed 1 --dim 16 --embed-epochs 2 --mlp-epochs 30 --lr-epochs 80 --hidden 16";
    const fs::path csv1 = dir / "report1.csv";
    const fs::path csv2 = dir / "report2.csv";
    REQUIRE(run("grid --input " + q(notes) + grid_flags + " --out " + q(csv1)) == 0);
    REQUIRE(run("grid --input " + q(notes) + grid_flags + " --out " + q(csv2)) == 0);

    const std::string body1 = slurp(csv1);
    CHECK(body1 == slurp(csv2));
    CHECK(std::count(body1.begin(), body1.end(), '\n') == 19); // header + 18 rows
    CHECK(slurp(dir / "report1.txt") == slurp(dir / "report2.txt"));

    CHECK(run("grid --input " + q(notes) + grid_flags + " --select-k 0 --out " +
              q(dir / "r0.csv")) == 1);
}

TEST_CASE("config file supplies defaults and flags override it") {
    const fs::path dir = work_dir();
    const fs::path cfg = dir / "synth.json";
    write_file(cfg, R"({"n": 25, "seed": 5, "patients": 8, "providers": 3})");

    const fs::path from_cfg = dir / "from_cfg.jsonl";
    REQUIRE(run("synth --config " + q(cfg) + " --out " + q(from_cfg)) == 0);
    CHECK(load_notes(from_cfg.string(), CorpusFormat::Jsonl).size() == 25);

    // CLI flag wins over the config value
    const fs::path overridden = dir / "overridden.jsonl";
    REQUIRE(run("synth --config " + q(cfg) + " --n 10 --out " + q(overridden)) == 0);
    CHECK(load_notes(overridden.string(), CorpusFormat::Jsonl).size() == 10);

    // and the config-driven run equals the flag-driven run with the same values
    const fs::path by_flags = dir / "by_flags.jsonl";
    REQUIRE(run("synth --n 25 --seed 5 --patients 8 --providers 3 --out " + q(by_flags)) == 0);
    CHECK(slurp(from_cfg) == slurp(by_flags));

    // a config file may also supply path options; omitting them everywhere
    // stays a usage error
    const fs::path out_in_cfg = dir / "out_in_cfg.jsonl";
    const fs::path cfg2 = dir / "synth_out.json";
    write_file(cfg2, R"({"n": 5, "out": ")" + out_in_cfg.string() + R"("})");
    REQUIRE(run("synth --config " + q(cfg2)) == 0);
    CHECK(load_notes(out_in_cfg.string(), CorpusFormat::Jsonl).size() == 5);
    CHECK(run("synth --n 5") == 2);
}
