#include <doctest.h>

#include "emdash/attribution.hpp"
#include "emdash/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace emdash;

namespace {

AttributionQuery full(double em_u, double em_c, double md_u, double md_c) {
    return {em_u, em_c, md_u, md_c};
}

}  // namespace

TEST_CASE("builtin profiles match the reference table") {
    const auto& p = builtin_profiles();
    REQUIRE(p.size() == oracle::table1.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CAPTURE(i);
        CHECK(p[i].model_name == oracle::table1[i].name);
        CHECK(*p[i].em_unconstrained == oracle::table1[i].em_u);
        CHECK(*p[i].em_constrained == oracle::table1[i].em_c);
        CHECK(*p[i].md_unconstrained == oracle::table1[i].md_u);
        CHECK(*p[i].md_constrained == oracle::table1[i].md_c);
    }
    const auto& h = human_baseline_profile();
    CHECK(*h.em_unconstrained == 3.23);
    CHECK(*h.em_constrained == 3.23);
    CHECK_FALSE(h.md_unconstrained);
    CHECK_FALSE(h.md_constrained);
}

TEST_CASE("scaling agrees with the oracle fit") {
    const auto s = FeatureScaling::fit(builtin_profiles());
    const auto o = oracle::fit();
    for (std::size_t f = 0; f < feature_count; ++f) {
        CHECK(s.mean[f] == doctest::Approx(o.mean[f]).epsilon(1e-12));
        CHECK(s.stddev[f] == doctest::Approx(o.sd[f]).epsilon(1e-12));
    }
    // Only Claude Haiku 3.5 has a constrained markdown rate
    CHECK(s.mean[3] == doctest::Approx(0.075));
}

TEST_CASE("every profile attributes to itself at distance zero") {
    const auto& p = builtin_profiles();
    for (std::size_t i = 0; i < p.size(); ++i) {
        CAPTURE(p[i].model_name);
        const auto r = attribute(features_of(p[i]), p);
        CHECK(r.ranked.front().model_name == p[i].model_name);
        CHECK(r.ranked.front().distance == 0.0);
    }
}

TEST_CASE("distances match the oracle on full queries") {
    const auto s = FeatureScaling::fit(builtin_profiles());
    const auto o = oracle::fit();
    const std::array<double, 4> q{5.0, 3.0, 2.0, 0.1};
    for (std::size_t i = 0; i < builtin_profiles().size(); ++i)
        CHECK(distance(full(q[0], q[1], q[2], q[3]), builtin_profiles()[i], s) ==
              doctest::Approx(oracle::dist(q, oracle::row_vec(oracle::table1[i]), o)).epsilon(1e-12));
    const auto r = attribute(full(q[0], q[1], q[2], q[3]), builtin_profiles());
    CHECK(r.ranked.front().model_name == oracle::table1[oracle::nearest(q, o)].name);
}

TEST_CASE("ranking and scores") {
    const auto r = attribute(query_from_rates(10.6, std::nullopt, std::nullopt), builtin_profiles());
    REQUIRE(r.ranked.size() == 12);
    CHECK(r.ranked.front().model_name == "GPT-4.1");
    double sum = 0;
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        sum += r.ranked[i].normalized_score;
        if (i) CHECK(r.ranked[i - 1].distance <= r.ranked[i].distance);
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(r.ranked[0].normalized_score > r.ranked[1].normalized_score);
}

TEST_CASE("partial features are renormalized") {
    const auto s = FeatureScaling::fit(builtin_profiles());
    const auto& gpt = builtin_profiles()[0];
    AttributionQuery q{};
    q[0] = 9.62;
    const double one = std::abs(s.z(0, 9.62) - s.z(0, 10.62));
    CHECK(distance(q, gpt, s) == doctest::Approx(one * 2.0));
    CHECK_THROWS_AS(distance(AttributionQuery{}, gpt, s), Error);
}

TEST_CASE("known condition restricts the comparison") {
    const auto s = FeatureScaling::fit(builtin_profiles());
    const auto q = query_from_rates(9.10, 0.0, Condition::md_suppressed);
    CHECK_FALSE(q[0]);
    CHECK(*q[1] == 9.10);
    CHECK_FALSE(q[2]);
    CHECK(*q[3] == 0.0);
    CHECK(distance(q, builtin_profiles()[0], s, Condition::md_suppressed) == doctest::Approx(0.0));
    CHECK(attribute(q, builtin_profiles(), Condition::md_suppressed).ranked.front().model_name == "GPT-4.1");

    const auto qa = query_from_rates(4.12, 5.38, Condition::unconstrained);
    CHECK(attribute(qa, builtin_profiles(), Condition::unconstrained).ranked.front().model_name == "GPT-4o");

    try {
        attribute(q, builtin_profiles(), Condition::em_suppressed);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
    }
}

TEST_CASE("models without em dashes are flagged as an em feature tie") {
    const auto r = attribute(query_from_rates(0.0, 0.0, std::nullopt), builtin_profiles());
    CHECK(r.ranked.front().model_name.rfind("Llama", 0) == 0);
    std::vector<std::string> sorted = r.em_feature_tie;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::string>{"Llama 3.1 8B Inst.", "Llama 3.3 70B Inst."});

    const auto em_only = attribute(query_from_rates(0.0, std::nullopt, std::nullopt), builtin_profiles());
    REQUIRE_FALSE(em_only.ties.empty());
    CHECK(em_only.ties.front().size() == 2);
    CHECK(em_only.ranked[0].distance == em_only.ranked[1].distance);

    CHECK(attribute(full(10.62, 9.10, 6.27, 0.0), builtin_profiles()).em_feature_tie.empty());
}

TEST_CASE("suppression resistance") {
    const auto& p = builtin_profiles();
    CHECK(*suppression_resistance(p[0]) == doctest::Approx(9.10 / 10.62));
    CHECK(*suppression_resistance(p[0]) == doctest::Approx(0.857).epsilon(1e-3));
    CHECK(*suppression_resistance(p[7]) == 0.0);
    CHECK_FALSE(suppression_resistance(p[10]));
    CHECK(*suppression_resistance(p[5]) > 1.0);
}

TEST_CASE("profiles csv round trip") {
    auto profiles = builtin_profiles();
    profiles.push_back(human_baseline_profile());
    profiles.push_back({"Odd, \"quoted\" name", "x", std::nullopt, 1.5, std::nullopt, 0.25});
    const auto csv = profiles_to_csv(profiles);
    CHECK(csv.rfind("model_name,provider,em_unconstrained,em_constrained,md_unconstrained,md_constrained\n", 0) == 0);
    CHECK(parse_profiles_csv(csv) == profiles);

    fixtures::TempDir dir;
    fixtures::write_file(dir / "p.csv", csv);
    CHECK(load_profiles_csv(dir / "p.csv") == profiles);

    CHECK_THROWS_AS(parse_profiles_csv("a,b\n"), Error);
    CHECK_THROWS_AS(parse_profiles_csv(
                        "model_name,provider,em_unconstrained,em_constrained,md_unconstrained,md_constrained\n"
                        "M,p,abc,,,\n"),
                    Error);
}

TEST_CASE("custom profile tables") {
    const std::vector<ModelProfile> two{{"x", "", 1.0, 1.0, std::nullopt, std::nullopt},
                                        {"y", "", 5.0, 5.0, std::nullopt, std::nullopt}};
    CHECK(attribute(query_from_rates(4.0, std::nullopt, std::nullopt), two).ranked.front().model_name == "y");
    CHECK_THROWS_AS(attribute(query_from_rates(4.0, std::nullopt, std::nullopt), {}), Error);
}

TEST_CASE("json output") {
    const auto j = to_json(attribute(query_from_rates(10.6, std::nullopt, std::nullopt), builtin_profiles()));
    REQUIRE(j["ranked"].is_array());
    CHECK(j["ranked"].size() == 12);
    CHECK(j["ranked"][0]["model_name"] == "GPT-4.1");
    CHECK(j.contains("ties"));
    CHECK(j.contains("em_feature_tie"));
}
