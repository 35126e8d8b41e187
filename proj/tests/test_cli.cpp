// End-to-end checks of the wsd binary: exit codes, run reports, config
// precedence, and byte-level determinism across runs and thread counts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kScratch = fs::path("cli_scratch");

// Runs the wsd binary inside the scratch directory.
RunResult run(const std::string& args) {
    fs::create_directories(kScratch);
    const fs::path out = kScratch / "stdout.txt";
    const fs::path err = kScratch / "stderr.txt";
    const std::string cmd = "cd " + kScratch.string() + " && " + WSD_CLI_PATH +
                            " " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void put(const std::string& name, const std::string& content) {
    fs::create_directories(kScratch);
    std::ofstream f(kScratch / name, std::ios::binary);
    f << content;
}

void copy_fixture(const std::string& rel, const std::string& name) {
    fs::create_directories(kScratch);
    fs::copy_file(fs::path(WSD_TEST_DATA) / rel, kScratch / name,
                  fs::copy_options::overwrite_existing);
}

std::string scratch_file(const std::string& name) {
    return slurp(kScratch / name);
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("").exit_code == 2);
    CHECK(run("score --pred only.jsonl").exit_code == 2);  // missing --gold
    CHECK(run("scale-embeddings --sigma -1 a b").exit_code == 2);
}

TEST_CASE("data errors exit with status 1 and name the error") {
    put("bad.vec", "a 1.0\nb 2.0 3.0\n");
    auto r = run("scale-embeddings bad.vec out.vec");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("DimensionMismatch") == 0);

    auto missing = run("scale-embeddings nope.vec out.vec");
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("FileNotFound") == 0);
}

TEST_CASE("scale-embeddings writes scaled vectors plus a run report") {
    put("tiny.vec", "a 1 5\nb 2 6\nc 3 9\n");
    auto r = run("scale-embeddings --sigma 0.1 tiny.vec scaled.vec");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());  // artifacts only, no stdout chatter

    const std::string scaled = scratch_file("scaled.vec");
    CHECK(scaled.find("a 0.1") == 0);

    json report = json::parse(scratch_file("scaled.vec.report.json"));
    CHECK(report["subcommand"] == "scale-embeddings");
    CHECK(report["counts"]["entries"] == 3);
    CHECK(report["counts"]["dimension"] == 2);
    CHECK(report["inputs"].contains("tiny.vec"));
    CHECK(report["outputs"].contains("scaled.vec"));
    CHECK(report.contains("config_hash"));
    CHECK(report["version"] == "0.1.0");

    SUBCASE("running twice produces identical bytes") {
        auto again = run("scale-embeddings --sigma 0.1 tiny.vec scaled2.vec");
        REQUIRE(again.exit_code == 0);
        CHECK(scratch_file("scaled2.vec") == scaled);
    }
}

TEST_CASE("config file supplies defaults, flags override") {
    put("tiny.vec", "a 1 5\nb 2 6\nc 3 9\n");
    put("cfg.json", "{\"sigma\": 0.2}");
    auto r = run("scale-embeddings --config cfg.json tiny.vec s_cfg.vec");
    REQUIRE(r.exit_code == 0);
    CHECK(scratch_file("s_cfg.vec").find("a 0.2") == 0);

    auto with_flag =
        run("scale-embeddings --config cfg.json --sigma 0.1 tiny.vec s_flag.vec");
    REQUIRE(with_flag.exit_code == 0);
    CHECK(scratch_file("s_flag.vec").find("a 0.1") == 0);

    CHECK(run("scale-embeddings --config cfg.json tiny.vec o.vec "
              "--format header")
              .exit_code == 1);  // header parse fails on plain data

    put("bad_key.json", "{\"bogus\": 1}");
    CHECK(run("scale-embeddings --config bad_key.json tiny.vec o.vec")
              .exit_code == 2);
}

TEST_CASE("training is byte-identical across thread counts and runs") {
    copy_fixture("walkthrough/embeddings.vec", "emb.vec");
    copy_fixture("walkthrough/train.jsonl", "train.jsonl");
    copy_fixture("walkthrough/test.jsonl", "test.jsonl");

    REQUIRE(run("train --instances train.jsonl --embeddings emb.vec "
                "--threads 1 --out m1.json")
                .exit_code == 0);
    REQUIRE(run("train --instances train.jsonl --embeddings emb.vec "
                "--threads 4 --out m4.json")
                .exit_code == 0);
    CHECK(scratch_file("m1.json") == scratch_file("m4.json"));

    REQUIRE(run("predict --model m1.json --instances test.jsonl "
                "--embeddings emb.vec --out p1.jsonl")
                .exit_code == 0);
    REQUIRE(run("predict --model m4.json --instances test.jsonl "
                "--embeddings emb.vec --threads 3 --out p2.jsonl")
                .exit_code == 0);
    CHECK(scratch_file("p1.jsonl") == scratch_file("p2.jsonl"));

    SUBCASE("stoplist mismatch is rejected") {
        put("extra.stop", "the\nof\n");
        auto r = run("predict --model m1.json --instances test.jsonl "
                     "--embeddings emb.vec --stoplist extra.stop --out px.jsonl");
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("StoplistMismatch") == 0);
    }

    SUBCASE("score reads the predictions back") {
        REQUIRE(run("score --pred p1.jsonl --gold test.jsonl --out sc.json")
                    .exit_code == 0);
        json sc = json::parse(scratch_file("sc.json"));
        CHECK(sc["n_scored"] == 6);
        CHECK(sc["run"]["subcommand"] == "score");
    }
}

TEST_CASE("align then build-xling round-trips through the file formats") {
    copy_fixture("xling/en.txt", "en.txt");
    copy_fixture("xling/zh.txt", "zh.txt");
    copy_fixture("xling/alignment.txt", "alignment.txt");
    copy_fixture("xling/dict.tsv", "dict.tsv");

    auto a = run("align --source en.txt --target zh.txt --iterations 5 "
                 "--out auto_align.txt --table-out ttable.tsv");
    REQUIRE(a.exit_code == 0);
    CHECK(!scratch_file("auto_align.txt").empty());
    CHECK(!scratch_file("ttable.tsv").empty());
    json a_report = json::parse(scratch_file("auto_align.txt.report.json"));
    CHECK(a_report["counts"]["pairs"] == 5);
    CHECK(a_report["counts"]["log_likelihood"].size() == 5);

    auto b = run("build-xling --source en.txt --target zh.txt "
                 "--alignment alignment.txt --dict dict.tsv "
                 "--out xinst.jsonl --counts-out counts.tsv");
    REQUIRE(b.exit_code == 0);
    json b_report = json::parse(scratch_file("xinst.jsonl.report.json"));
    CHECK(b_report["counts"]["emitted"] == 5);
    CHECK(b_report["counts"]["skipped_unlisted"] == 1);
    CHECK(b_report["counts"]["unaligned_headwords"] == 1);

    SUBCASE("projected instances train a cross-lingual model") {
        REQUIRE(run("train --instances xinst.jsonl --composition off "
                    "--out xmodel.json")
                    .exit_code == 0);
        REQUIRE(run("predict --model xmodel.json --instances xinst.jsonl "
                    "--out xpred.jsonl")
                    .exit_code == 0);
        REQUIRE(run("score --pred xpred.jsonl --gold xinst.jsonl --out xsc.json")
                    .exit_code == 0);
        json sc = json::parse(scratch_file("xsc.json"));
        CHECK(sc["n_scored"] == 5);
    }
}

TEST_CASE("filter-gold, kappa and stats") {
    copy_fixture("xling/annotations.tsv", "annotations.tsv");
    copy_fixture("xling/xgold.jsonl", "xgold.jsonl");
    copy_fixture("xling/dict.tsv", "dict.tsv");
    copy_fixture("xling/counts.tsv", "counts.tsv");

    auto ids = run("filter-gold --annotations annotations.tsv "
                   "--mode include_all --out keep.txt");
    REQUIRE(ids.exit_code == 0);
    CHECK(scratch_file("keep.txt") == "x1\nx2\nx3\n");

    auto strict = run("filter-gold --annotations annotations.tsv "
                      "--mode exclude_oov --instances xgold.jsonl "
                      "--out kept.jsonl");
    REQUIRE(strict.exit_code == 0);
    CHECK(scratch_file("kept.jsonl").find("\"x3\"") == std::string::npos);
    json f_report = json::parse(scratch_file("kept.jsonl.report.json"));
    CHECK(f_report["counts"]["retained"] == 2);

    auto k = run("kappa --annotations annotations.tsv --gold xgold.jsonl "
                 "--dict dict.tsv --counts counts.tsv");
    REQUIRE(k.exit_code == 0);
    json kdoc = json::parse(k.out);
    // bank has two equal-count translations: chance 0.5; one agreeing pair
    // of two: p_a 0.5 -> kappa 0
    CHECK(kdoc["p_a"] == 0.5);
    CHECK(kdoc["p_e"] == 0.5);
    CHECK(kdoc["kappa"] == 0.0);
    CHECK(kdoc["n_pairs"] == 2);

    auto s = run("stats --instances xgold.jsonl --annotations annotations.tsv");
    REQUIRE(s.exit_code == 0);
    json sdoc = json::parse(s.out);
    CHECK(sdoc["annotations"]["modes"]["include_all"] == 3);
    CHECK(sdoc["annotations"]["modes"]["exclude_oov"] == 2);
    CHECK(sdoc["annotations"]["modes"]["partial_agreement"] == 1);
    CHECK(sdoc["annotations"]["modes"]["complete_agreement"] == 1);
    CHECK(sdoc["annotations"]["mode_lemmas"]["include_all"] == 2);
    CHECK(sdoc["instances"]["count"] == 3);
}

TEST_CASE("mcnemar subcommand") {
    put("gold.jsonl",
        R"({"id":"1","target_lemma":"w","target_index":0,"gold":["a"],"tokens":[{"lemma":"w"}]})"
        "\n"
        R"({"id":"2","target_lemma":"w","target_index":0,"gold":["a"],"tokens":[{"lemma":"w"}]})"
        "\n");
    put("pa.jsonl",
        "{\"id\":\"1\",\"sense\":\"a\"}\n{\"id\":\"2\",\"sense\":\"x\"}\n");
    put("pb.jsonl",
        "{\"id\":\"1\",\"sense\":\"x\"}\n{\"id\":\"2\",\"sense\":\"a\"}\n");
    auto r = run("mcnemar --pred-a pa.jsonl --pred-b pb.jsonl --gold gold.jsonl");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["b"] == 1);
    CHECK(doc["c"] == 1);
    CHECK(doc["method"] == "exact");
    CHECK(doc["p_value"] == 1.0);
}
