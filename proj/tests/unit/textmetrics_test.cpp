#include <doctest.h>

#include "emdash/error.hpp"
#include "emdash/textmetrics.hpp"
#include "fixtures.hpp"

using namespace emdash;

TEST_CASE("count_words counts whitespace tokens with an alphanumeric") {
    CHECK(count_words("one two  three") == 3);
    CHECK(count_words("") == 0);
    CHECK(count_words("a—b — c") == 2);
    CHECK(count_words("   \n\t ") == 0);
    CHECK(count_words("-- ** ## 1. x") == 2);
    CHECK(count_words("café naïve Straße") == 3);
    CHECK(count_words("東京 と 大阪") == 3);
    // no-break and ideographic spaces separate tokens
    CHECK(count_words("one two　three") == 3);
    CHECK(count_words("«» “” … 🙂") == 0);
    CHECK(count_words("line\r\nbreak") == 2);
}

TEST_CASE("count_dashes tallies each dash kind") {
    CHECK(count_dashes("a—b – c -- d") == DashCounts{1, 1, 1, 0});
    CHECK(count_dashes("----") == DashCounts{0, 0, 0, 1});
    CHECK(count_dashes("well-known") == DashCounts{});
    CHECK(count_dashes("---\n--\n-") == DashCounts{0, 0, 1, 1});
    CHECK(count_dashes("——") == DashCounts{2, 0, 0, 0});
    CHECK(count_dashes("-—-") == DashCounts{1, 0, 0, 0});
    // U+2012 figure dash and U+2015 horizontal bar are not counted
    CHECK(count_dashes("‒―") == DashCounts{});
    // truncated UTF-8 at the end is ignored
    CHECK(count_dashes("abc\xE2\x80") == DashCounts{});

    const auto text = fixtures::essay(10000, 91);
    CHECK(count_words(text) == 10000);
    CHECK(count_dashes(text).em == 91);
}

TEST_CASE("per_1k is the exact ratio") {
    CHECK(per_1k(53, 5000) == doctest::Approx(10.6).epsilon(1e-15));
    CHECK(per_1k(0, 1000) == 0.0);
    CHECK(per_1k(91, 10000) == doctest::Approx(9.1).epsilon(1e-15));
    CHECK(format_rate(per_1k(91, 10000)) == "9.10");
    CHECK_THROWS_AS(per_1k(1, 0), Error);
}

TEST_CASE("format_rate rounds half up at two decimals") {
    CHECK(format_rate(0.0) == "0.00");
    CHECK(format_rate(9.105) == "9.11");
    CHECK(format_rate(0.125) == "0.13");
    CHECK(format_rate(1.004999) == "1.00");
    CHECK(format_rate(10.615) == "10.62");
    CHECK(format_rate(17.12) == "17.12");
    CHECK(format_rate(1000.0 / 3.0) == "333.33");
}

TEST_CASE("analyze_text composes both counters") {
    SUBCASE("em dashes without markdown") {
        const auto m = analyze_text("s", fixtures::essay(1000, 9));
        CHECK(m.words == 1000);
        CHECK(m.em_per_1k == doctest::Approx(9.0));
        CHECK(m.md_per_1k == 0.0);
    }
    SUBCASE("one heading and one em dash in 1000 words") {
        const auto text = "# T\n\n" + fixtures::essay(999, 1);
        const auto m = analyze_text("s", text);
        CHECK(m.words == 1000);
        CHECK(m.md_features.headings == 1);
        CHECK(m.md_per_1k == doctest::Approx(1.0));
        CHECK(m.em_per_1k == doctest::Approx(1.0));
    }
    SUBCASE("whitespace only") {
        try {
            analyze_text("blank-7", "  \n\t");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::undefined_rate);
            CHECK(std::string(e.what()).find("blank-7") != std::string::npos);
        }
    }
}

TEST_CASE("analyze_sample keys the record by sample id") {
    const auto s = fixtures::human_sample("essay-3", "A short — essay.");
    const auto m = analyze_sample(s);
    CHECK(m.sample_id == "essay-3");
    CHECK(m.dash.em == 1);
    const auto j = to_json(m);
    CHECK(j["sample_id"] == "essay-3");
    CHECK(j["words"] == 3);
    CHECK(j["dash"]["em"] == 1);
}
