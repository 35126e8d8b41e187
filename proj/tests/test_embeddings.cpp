#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "test_support.hpp"
#include "wsd/embeddings.hpp"
#include "wsd/error.hpp"

using namespace wsd;
using emb::VectorFormat;
using testsup::make_table;

namespace {

void check_error(const std::function<void()>& fn, const std::string& code) {
    try {
        fn();
        FAIL("expected error ", code);
    } catch (const Error& e) {
        CHECK(e.code() == code);
    }
}

}  // namespace

TEST_CASE("load plain format") {
    auto t = make_table("a 1.0 0.0\nb 0.0 1.0");
    CHECK(t.dimension() == 2);
    CHECK(t.size() == 2);
    CHECK((*t.lookup("a"))[0] == 1.0);
    CHECK((*t.lookup("b"))[1] == 1.0);
}

TEST_CASE("load header format") {
    std::istringstream in("2 3\nx 1 2 3\ny 4 5 6");
    auto t = emb::load_embeddings(in, VectorFormat::kHeader);
    CHECK(t.dimension() == 3);
    CHECK(t.size() == 2);
    CHECK((*t.lookup("y"))[2] == 6.0);
}

TEST_CASE("load errors") {
    check_error([] { make_table("a 1.0\nb 2.0 3.0"); }, "DimensionMismatch");
    check_error([] { make_table("A 1 2\na 3 4"); }, "DuplicateWord");
    check_error([] { make_table("a 1.0 zzz"); }, "NonNumericValue");
    check_error([] { make_table("a 1.0 inf"); }, "NonNumericValue");
    check_error([] { make_table(""); }, "EmptyInput");
    check_error([] { make_table("a"); }, "DimensionMismatch");
    check_error(
        [] {
            std::istringstream in("3 2\nx 1 2\ny 3 4");
            emb::load_embeddings(in, VectorFormat::kHeader);
        },
        "HeaderRecordCount");
}

TEST_CASE("load tolerates CRLF, tabs and blank lines") {
    auto t = make_table("a\t1.0\t2.0\r\n\nb 3.0   4.0\r\n");
    CHECK(t.size() == 2);
    CHECK((*t.lookup("b"))[1] == 4.0);
}

TEST_CASE("column stdevs") {
    // sample stdev of {1,2,3} is exactly 1
    auto t = make_table("a 1\nb 2\nc 3");
    auto s = emb::column_stdevs_serial(t);
    CHECK(s.size() == 1);
    CHECK(s[0] == doctest::Approx(1.0).epsilon(1e-15));

    // {0,0} and {0,2} -> (0, sqrt(2))
    auto t2 = make_table("a 0 0\nb 0 2");
    auto s2 = emb::column_stdevs_serial(t2);
    CHECK(s2[0] == 0.0);
    CHECK(s2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    // identical entries: zero variance everywhere
    auto t3 = make_table("a 5 7\nb 5 7");
    auto s3 = emb::column_stdevs_serial(t3);
    CHECK(s3[0] == 0.0);
    CHECK(s3[1] == 0.0);

    check_error([] { emb::column_stdevs_serial(make_table("a 1 2")); },
                "TooFewEntries");
}

TEST_CASE("scale embeddings") {
    auto t = make_table("a 1\nb 2\nc 3");
    auto scaled = emb::scale_embeddings_serial(t, 0.1);
    CHECK((*scaled.lookup("a"))[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK((*scaled.lookup("b"))[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK((*scaled.lookup("c"))[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(scaled.scaled_sigma() == 0.1);
    CHECK(!t.scaled_sigma().has_value());  // original untouched
    CHECK((*t.lookup("a"))[0] == 1.0);

    SUBCASE("idempotent at fixed sigma") {
        auto twice = emb::scale_embeddings_serial(scaled, 0.1);
        for (std::size_t i = 0; i < scaled.size(); ++i) {
            for (std::size_t c = 0; c < scaled.dimension(); ++c) {
                CHECK(std::fabs(twice.row(i)[c] - scaled.row(i)[c]) <= 1e-12);
            }
        }
    }

    check_error([&] { emb::scale_embeddings_serial(t, 0.0); }, "NonPositiveSigma");
    check_error([&] { emb::scale_embeddings_serial(t, -1.0); }, "NonPositiveSigma");
    check_error(
        [] { emb::scale_embeddings_serial(make_table("a 1 1\nb 2 1"), 0.1); },
        "ZeroVarianceDimension");
}

TEST_CASE("scaling yields sigma in every dimension") {
    testsup::Rng rng(42);
    auto t = testsup::random_table(rng, 200, 13);
    for (double sigma : {0.05, 0.1, 0.15}) {
        auto scaled = emb::scale_embeddings_serial(t, sigma);
        for (double s : emb::column_stdevs_serial(scaled)) {
            CHECK(std::fabs(s - sigma) / sigma <= 1e-9);
        }
    }
}

TEST_CASE("lookup is lowercased exact match") {
    auto t = make_table("a 1 0\nb 0 1");
    CHECK(t.lookup("a").has_value());
    CHECK((*t.lookup("A"))[0] == 1.0);
    CHECK(!t.lookup("zzz").has_value());
}

TEST_CASE("serialize round-trips exactly") {
    testsup::Rng rng(7);
    auto t = testsup::random_table(rng, 37, 5);
    auto text = emb::serialize_embeddings(t);
    auto t2 = make_table(text);
    REQUIRE(t2.size() == t.size());
    REQUIRE(t2.dimension() == t.dimension());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t2.words()[i] == t.words()[i]);
        for (std::size_t c = 0; c < t.dimension(); ++c) {
            CHECK(t2.row(i)[c] == t.row(i)[c]);
        }
    }
    CHECK(emb::serialize_embeddings(t2) == text);
}

TEST_CASE("parallel kernels match the serial reference bitwise") {
    testsup::Rng rng(99);
    auto t = testsup::random_table(rng, 301, 17);
    auto serial = emb::column_stdevs_serial(t);
    auto parallel = emb::column_stdevs(t, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t c = 0; c < serial.size(); ++c) {
        CHECK(serial[c] == parallel[c]);
    }
    auto s1 = emb::scale_embeddings_serial(t, 0.1);
    auto s2 = emb::scale_embeddings(t, 0.1, 4);
    CHECK(emb::serialize_embeddings(s1) == emb::serialize_embeddings(s2));
}

TEST_CASE("scaling does not commute with vocabulary subsetting") {
    // The pipeline scales the full table first; dropping a row afterwards
    // is not the same as scaling the subset.
    auto t = make_table("a 1\nb 2\nc 9");
    auto scaled_full = emb::scale_embeddings_serial(t, 0.1);
    auto subset_first = emb::scale_embeddings_serial(make_table("a 1\nb 2"), 0.1);
    CHECK((*scaled_full.lookup("a"))[0] != (*subset_first.lookup("a"))[0]);
}
