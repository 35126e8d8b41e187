#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_support.hpp"
#include "wsd/error.hpp"
#include "wsd/features.hpp"

using namespace wsd;
using testsup::make_instance;

namespace {

corpus::NormalizedContext norm_of(const corpus::Instance& inst) {
    return corpus::normalize_tokens(inst, corpus::default_stoplist());
}

// Independent oracle for the sum composition: straight per-token loop.
std::vector<double> naive_sum(const corpus::Instance& inst,
                              const std::unordered_set<std::string>& stoplist,
                              const emb::EmbeddingTable& table) {
    std::vector<double> acc(table.dimension(), 0.0);
    for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
        if (i == inst.target_index) continue;
        const auto& tok = inst.tokens[i];
        if (tok.punct || stoplist.count(tok.lemma)) continue;
        auto vec = table.lookup(tok.lemma);
        if (!vec) continue;
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += (*vec)[c];
    }
    return acc;
}

}  // namespace

TEST_CASE("surrounding word features deduplicate") {
    auto inst = make_instance("1", {"river", "bank", "water", "river"}, 1);
    auto sw = feat::surrounding_word_features(norm_of(inst));
    CHECK(sw == std::set<std::string>{"SW=river", "SW=water"});
}

TEST_CASE("surrounding word features: empty context") {
    auto inst = make_instance("1", {"bank"}, 0);
    CHECK(feat::surrounding_word_features(norm_of(inst)).empty());
}

TEST_CASE("target lemma elsewhere in context is kept") {
    auto inst = make_instance("1", {"bank", "of", "bank"}, 0);
    auto sw = feat::surrounding_word_features(norm_of(inst));
    CHECK(sw.count("SW=bank") == 1);
}

TEST_CASE("collocation features") {
    feat::FeatureConfig config;

    SUBCASE("single offset") {
        config.collocation_offsets = {{-1, -1}};
        auto inst = make_instance("1", {"the", "bank", "of"}, 1);
        auto col = feat::collocation_features(inst, config);
        CHECK(col == std::set<std::string>{"C[-1,-1]=the"});
    }
    SUBCASE("boundary padding") {
        config.collocation_offsets = {{1, 2}};
        auto inst = make_instance("1", {"the", "bank", "of"}, 1);
        auto col = feat::collocation_features(inst, config);
        CHECK(col == std::set<std::string>{"C[1,2]=of_^"});
    }
    SUBCASE("span before the target") {
        config.collocation_offsets = {{-2, -1}};
        auto inst = make_instance("1", {"big", "red", "dog"}, 2);
        auto col = feat::collocation_features(inst, config);
        CHECK(col == std::set<std::string>{"C[-2,-1]=big_red"});
    }
    SUBCASE("span across the target includes it") {
        config.collocation_offsets = {{-1, 1}};
        auto inst = make_instance("1", {"the", "bank", "of"}, 1);
        auto col = feat::collocation_features(inst, config);
        CHECK(col == std::set<std::string>{"C[-1,1]=the_bank_of"});
    }
}

TEST_CASE("pos features") {
    feat::FeatureConfig config;
    config.pos_offsets = {-1, 0, 1};
    auto inst = make_instance("1", {"the", "bank", "of"}, 1);
    inst.tokens[0].pos = "DT";
    inst.tokens[1].pos = "NN";
    inst.tokens[2].pos = "IN";
    auto pos = feat::pos_features(inst, config);
    CHECK(pos == std::set<std::string>{"P[-1]=DT", "P[0]=NN", "P[1]=IN"});

    SUBCASE("boundary yields caret") {
        auto first = make_instance("1", {"bank", "of"}, 0);
        first.tokens[0].pos = "NN";
        first.tokens[1].pos = "IN";
        auto p = feat::pos_features(first, config);
        CHECK(p == std::set<std::string>{"P[-1]=^", "P[0]=NN", "P[1]=IN"});
    }
    SUBCASE("empty tag is omitted") {
        inst.tokens[2].pos = "";
        auto p = feat::pos_features(inst, config);
        CHECK(p == std::set<std::string>{"P[-1]=DT", "P[0]=NN"});
    }
}

TEST_CASE("composition") {
    auto table = emb::scale_embeddings_serial(
        testsup::make_table("u 1 0\nv 0.5 0.5\nq 2 -1"), 1.0);
    // Re-derive what scaling did to keep the arithmetic below transparent:
    // this test composes the scaled vectors, so compare against lookups.
    auto inst = make_instance("1", {"u", "bank", "v"}, 1);
    feat::FeatureConfig config;

    SUBCASE("sum") {
        config.composition = feat::Composition::kSum;
        auto dense =
            feat::compose_embedding_context(inst, norm_of(inst), table, config);
        REQUIRE(dense.size() == 2);
        auto u = *table.lookup("u");
        auto v = *table.lookup("v");
        CHECK(dense[0] == u[0] + v[0]);
        CHECK(dense[1] == u[1] + v[1]);
    }
    SUBCASE("average") {
        config.composition = feat::Composition::kAverage;
        auto dense =
            feat::compose_embedding_context(inst, norm_of(inst), table, config);
        auto u = *table.lookup("u");
        auto v = *table.lookup("v");
        CHECK(dense[0] == (u[0] + v[0]) / 2.0);
        CHECK(dense[1] == (u[1] + v[1]) / 2.0);
    }
    SUBCASE("concat pads boundary and OOV slots with zeros") {
        config.composition = feat::Composition::kConcat;
        config.concat_window = 3;
        // left neighbour in vocabulary, right is the boundary
        auto end_inst = make_instance("1", {"u", "bank"}, 1);
        auto dense = feat::compose_embedding_context(end_inst, norm_of(end_inst),
                                                     table, config);
        auto u = *table.lookup("u");
        REQUIRE(dense.size() == 4);
        CHECK(dense[0] == u[0]);
        CHECK(dense[1] == u[1]);
        CHECK(dense[2] == 0.0);
        CHECK(dense[3] == 0.0);
    }
    SUBCASE("off") {
        config.composition = feat::Composition::kOff;
        CHECK(feat::compose_embedding_context(inst, norm_of(inst), table, config)
                  .empty());
    }
    SUBCASE("unscaled table is rejected") {
        auto raw = testsup::make_table("u 1 0\nv 0.5 0.5");
        config.composition = feat::Composition::kSum;
        try {
            feat::compose_embedding_context(inst, norm_of(inst), raw, config);
            FAIL("expected TableNotScaled");
        } catch (const Error& e) {
            CHECK(e.code() == "TableNotScaled");
        }
    }
    SUBCASE("even concat windows are rejected") {
        config.composition = feat::Composition::kConcat;
        config.concat_window = 4;
        try {
            feat::compose_embedding_context(inst, norm_of(inst), table, config);
            FAIL("expected BadWindow");
        } catch (const Error& e) {
            CHECK(e.code() == "BadWindow");
        }
    }
}

TEST_CASE("dense length is fixed for every instance") {
    testsup::Rng rng(5);
    auto table = emb::scale_embeddings_serial(testsup::random_table(rng, 30, 6), 0.1);
    feat::FeatureConfig config;
    config.sigma = 0.1;

    auto empty_ctx = make_instance("1", {"w0"}, 0);
    for (auto mode : {feat::Composition::kSum, feat::Composition::kAverage}) {
        config.composition = mode;
        auto dense = feat::compose_embedding_context(empty_ctx, norm_of(empty_ctx),
                                                     table, config);
        CHECK(dense.size() == 6);
        CHECK(std::all_of(dense.begin(), dense.end(),
                          [](double v) { return v == 0.0; }));
    }
    config.composition = feat::Composition::kConcat;
    for (int w : {3, 7, 11}) {
        config.concat_window = w;
        auto dense = feat::compose_embedding_context(empty_ctx, norm_of(empty_ctx),
                                                     table, config);
        CHECK(dense.size() == 6u * static_cast<std::size_t>(w - 1));
    }
}

TEST_CASE("sum composition matches the naive oracle on random instances") {
    testsup::Rng rng(2024);
    auto table = emb::scale_embeddings_serial(testsup::random_table(rng, 60, 9), 0.1);
    feat::FeatureConfig config;
    config.composition = feat::Composition::kSum;
    const auto& stoplist = corpus::default_stoplist();

    for (int n = 0; n < 200; ++n) {
        std::vector<std::string> lemmas;
        const std::size_t len = 1 + rng.below(30);
        for (std::size_t i = 0; i < len; ++i) {
            switch (rng.below(4)) {
                case 0: lemmas.push_back("w" + std::to_string(rng.below(60))); break;
                case 1: lemmas.push_back("oov" + std::to_string(rng.below(9))); break;
                case 2: lemmas.push_back("the"); break;  // stopword
                default: lemmas.push_back("w" + std::to_string(rng.below(200)));
            }
        }
        auto inst = make_instance("r", lemmas, rng.below(len));
        if (rng.chance(0.2)) {  // sprinkle punctuation
            inst.tokens[rng.below(len)].punct = true;
        }
        auto dense =
            feat::compose_embedding_context(inst, norm_of(inst), table, config);
        auto expect = naive_sum(inst, stoplist, table);
        REQUIRE(dense.size() == expect.size());
        for (std::size_t c = 0; c < dense.size(); ++c) {
            CHECK(std::fabs(dense[c] - expect[c]) <= 1e-9);
        }
    }
}

TEST_CASE("the target's own vector never reaches the dense block") {
    // Same scaled table, two instances whose only difference is which
    // vocabulary entry sits at the target slot.
    auto table =
        emb::scale_embeddings_serial(testsup::make_table("a 1 2\nb 3 4\nc 5 7"), 0.1);
    auto inst = make_instance("1", {"a", "c", "b"}, 1);
    auto inst2 = make_instance("2", {"a", "b", "b"}, 1);
    feat::FeatureConfig config;
    for (auto mode : {feat::Composition::kSum, feat::Composition::kAverage,
                      feat::Composition::kConcat}) {
        config.composition = mode;
        config.concat_window = 3;
        auto da =
            feat::compose_embedding_context(inst, norm_of(inst), table, config);
        auto db =
            feat::compose_embedding_context(inst2, norm_of(inst2), table, config);
        CHECK(da == db);
    }
}

TEST_CASE("assemble_features") {
    auto table = emb::scale_embeddings_serial(
        testsup::make_table("river 1 0\nwater 0 1\nbank 1 1"), 0.1);
    auto inst = make_instance("1", {"river", "bank", "water"}, 1);
    inst.tokens[0].pos = "NN";
    inst.tokens[1].pos = "NN";
    inst.tokens[2].pos = "NN";
    feat::FeatureConfig config;
    config.sigma = 0.1;

    SUBCASE("sparse on, composition off") {
        config.composition = feat::Composition::kOff;
        auto fv = feat::assemble_features(inst, norm_of(inst), nullptr, config);
        CHECK(fv.dense.empty());
        CHECK(!fv.binary.empty());
    }
    SUBCASE("sparse off, sum on") {
        config.use_surrounding_words = false;
        config.use_collocations = false;
        config.use_pos = false;
        config.composition = feat::Composition::kSum;
        auto fv = feat::assemble_features(inst, norm_of(inst), &table, config);
        CHECK(fv.binary.empty());
        CHECK(fv.dense.size() == 2);
    }
    SUBCASE("full config feature counts") {
        config.composition = feat::Composition::kSum;
        auto fv = feat::assemble_features(inst, norm_of(inst), &table, config);
        std::size_t sw = 0, colloc = 0, pos = 0;
        for (const auto& name : fv.binary) {
            if (name.starts_with("SW=")) ++sw;
            if (name.starts_with("C[")) ++colloc;
            if (name.starts_with("P[")) ++pos;
        }
        CHECK(sw == 2);  // river, water
        CHECK(colloc == config.collocation_offsets.size());
        CHECK(pos == config.pos_offsets.size());
        CHECK(fv.dense.size() == 2);
    }
    SUBCASE("deterministic output") {
        config.composition = feat::Composition::kSum;
        auto a = feat::assemble_features(inst, norm_of(inst), &table, config);
        auto b = feat::assemble_features(inst, norm_of(inst), &table, config);
        CHECK(a.binary == b.binary);
        CHECK(a.dense == b.dense);
    }
}
