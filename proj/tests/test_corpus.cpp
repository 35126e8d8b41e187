#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <sstream>

#include "test_support.hpp"
#include "wsd/corpus.hpp"
#include "wsd/error.hpp"

using namespace wsd;

namespace {

std::vector<corpus::Instance> parse(const std::string& text) {
    std::istringstream in(text);
    return corpus::parse_instances(in);
}

void check_error(const std::function<void()>& fn, const std::string& code) {
    try {
        fn();
        FAIL("expected error ", code);
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

const char* kBankLine =
    R"({"id":"i1","target_lemma":"bank","target_pos":"NN","target_index":1,)"
    R"("gold":["bank%1"],"tokens":[)"
    R"({"surface":"the","lemma":"the","pos":"DT","sent":0,"punct":false},)"
    R"({"surface":"bank","lemma":"bank","pos":"NN","sent":0,"punct":false},)"
    R"({"surface":".","lemma":"","pos":".","sent":0,"punct":true}]})";

}  // namespace

TEST_CASE("parse a well-formed instance") {
    auto instances = parse(std::string(kBankLine) + "\n");
    REQUIRE(instances.size() == 1);
    const auto& inst = instances[0];
    CHECK(inst.id == "i1");
    CHECK(inst.target_lemma == "bank");
    CHECK(inst.target_index == 1);
    CHECK(inst.tokens.size() == 3);
    CHECK(inst.gold == std::vector<std::string>{"bank%1"});
    CHECK(inst.tokens[2].punct);
    CHECK_FALSE(inst.proper_noun);
}

TEST_CASE("parse errors") {
    check_error([] { parse(std::string(kBankLine) + "\n" + kBankLine + "\n"); },
                "DuplicateId");
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":5,)"
                  R"("tokens":[{"lemma":"a"},{"lemma":"b"},{"lemma":"c"}]})");
        },
        "IndexOutOfRange");
    check_error([] { parse("{not json}\n"); }, "MalformedRecord");
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":0,"bogus":1,)"
                  R"("tokens":[{"lemma":"a"}]})");
        },
        "MalformedRecord");
    // target token lemma must equal target_lemma
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":0,)"
                  R"("tokens":[{"lemma":"b"}]})");
        },
        "MalformedRecord");
    // sentence index may not decrease
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":0,)"
                  R"("tokens":[{"lemma":"a","sent":1},{"lemma":"b","sent":0}]})");
        },
        "MalformedRecord");
    // gold ids must be unique
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":0,)"
                  R"("gold":["s1","s1"],"tokens":[{"lemma":"a"}]})");
        },
        "MalformedRecord");
    // non-punctuation token with empty lemma
    check_error(
        [] {
            parse(R"({"id":"i1","target_lemma":"a","target_index":0,)"
                  R"("tokens":[{"lemma":"a"},{"lemma":""}]})");
        },
        "MalformedRecord");
}

TEST_CASE("lemmas are lowercased on parse") {
    auto instances = parse(
        R"({"id":"i1","target_lemma":"Bank","target_index":0,)"
        R"("tokens":[{"lemma":"BANK"}]})");
    CHECK(instances[0].target_lemma == "bank");
    CHECK(instances[0].tokens[0].lemma == "bank");
}

TEST_CASE("parse-serialize-parse is the identity") {
    auto one = parse(std::string(kBankLine) + "\n");
    auto text = corpus::serialize_instances(one);
    auto two = parse(text);
    REQUIRE(two.size() == one.size());
    CHECK(corpus::serialize_instances(two) == text);
    CHECK(two[0].id == one[0].id);
    CHECK(two[0].tokens.size() == one[0].tokens.size());
    CHECK(two[0].tokens[2].punct == one[0].tokens[2].punct);
}

TEST_CASE("normalize_tokens") {
    auto instances = parse(std::string(kBankLine) + "\n");
    const auto& inst = instances[0];

    SUBCASE("stopwords and punctuation are discarded") {
        auto norm = corpus::normalize_tokens(inst, {"the"});
        REQUIRE(norm.tokens.size() == 1);
        CHECK(norm.tokens[0].lemma == "bank");
        CHECK(norm.target_index == 0);
    }
    SUBCASE("the target survives its own stoplisting") {
        auto norm = corpus::normalize_tokens(inst, {"the", "bank"});
        REQUIRE(norm.tokens.size() == 1);
        CHECK(norm.tokens[0].lemma == "bank");
    }
    SUBCASE("no stopwords leaves non-punct tokens") {
        auto norm = corpus::normalize_tokens(inst, {});
        CHECK(norm.tokens.size() == 2);  // punctuation still dropped
        CHECK(norm.target_index == 1);
    }
    SUBCASE("idempotent") {
        auto norm = corpus::normalize_tokens(inst, {"the"});
        corpus::Instance again;
        again.id = "x";
        again.target_lemma = inst.target_lemma;
        again.tokens = norm.tokens;
        again.target_index = norm.target_index;
        auto norm2 = corpus::normalize_tokens(again, {"the"});
        CHECK(norm2.tokens.size() == norm.tokens.size());
        CHECK(norm2.target_index == norm.target_index);
    }
}

TEST_CASE("group_by_lemma") {
    std::vector<corpus::Instance> instances;
    instances.push_back(testsup::make_instance("1", {"bank"}, 0));
    instances.push_back(testsup::make_instance("2", {"bank"}, 0));
    instances.push_back(testsup::make_instance("3", {"art"}, 0));
    auto grouped = corpus::group_by_lemma(instances);
    CHECK(grouped.size() == 2);
    CHECK(grouped["bank"].size() == 2);
    CHECK(grouped["art"].size() == 1);
    CHECK(grouped["bank"][0].id == "1");  // order preserved

    CHECK(corpus::group_by_lemma({}).empty());

    std::size_t total = 0;
    for (const auto& [lemma, group] : grouped) total += group.size();
    CHECK(total == instances.size());
}

TEST_CASE("default stoplist has 127 entries") {
    CHECK(corpus::default_stoplist_words().size() == 127);
    CHECK(corpus::default_stoplist().size() == 127);
    CHECK(corpus::default_stoplist().count("the") == 1);
    CHECK(corpus::default_stoplist().count("bank") == 0);
}

TEST_CASE("stoplist loading and hashing") {
    std::istringstream in("The\nof\n\nand\n");
    auto list = corpus::load_stoplist(in);
    CHECK(list.size() == 3);
    CHECK(list.count("the") == 1);
    // hash depends on content, not insertion order
    std::istringstream in2("and\nof\nthe\n");
    CHECK(corpus::stoplist_hash(list) ==
          corpus::stoplist_hash(corpus::load_stoplist(in2)));
    CHECK(corpus::stoplist_hash(list) !=
          corpus::stoplist_hash(corpus::default_stoplist()));
}

TEST_CASE("build_inventory orders by frequency then first occurrence") {
    std::vector<corpus::Instance> data;
    data.push_back(testsup::make_instance("1", {"bank"}, 0, {"s2"}));
    data.push_back(testsup::make_instance("2", {"bank"}, 0, {"s1"}));
    data.push_back(testsup::make_instance("3", {"bank"}, 0, {"s1"}));
    data.push_back(testsup::make_instance("4", {"bank"}, 0, {"s3"}));
    auto inv = corpus::build_inventory(data);
    CHECK(inv.senses["bank"] == std::vector<std::string>{"s1", "s2", "s3"});
    CHECK(inv.first_sense("bank") == "s1");
    CHECK(inv.contains("bank", "s3"));
    CHECK_FALSE(inv.contains("bank", "s9"));
    check_error([&] { inv.first_sense("nope"); }, "MissingLemma");
}

TEST_CASE("inventory TSV round-trip") {
    std::vector<corpus::Instance> data;
    data.push_back(testsup::make_instance("1", {"bank"}, 0, {"s1"}));
    data.push_back(testsup::make_instance("2", {"art"}, 0, {"a1", "a2"}));
    auto inv = corpus::build_inventory(data);
    auto text = corpus::serialize_inventory(inv);
    std::istringstream in(text);
    auto inv2 = corpus::load_inventory(in);
    CHECK(inv2.senses == inv.senses);
}
