#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

using nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

Outcome run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
    static fixtures::TempDir scratch;
    static int counter = 0;
    const auto err_path = scratch / ("err" + std::to_string(counter++));
    const auto in_path = scratch / ("in" + std::to_string(counter++));
    fixtures::write_file(in_path, stdin_text);
    std::string cmd = quote(EMDASH_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " < " + quote(in_path.string()) + " 2> " + quote(err_path.string());
    Outcome o;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) o.out.append(buf, n);
    const int status = pclose(pipe);
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.err = fixtures::slurp(err_path);
    return o;
}

std::string config_path(const std::string& name) { return std::string(EMDASH_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"attribute", "--help"}).code == 0);
    const auto none = run({});
    CHECK(none.code == 2);
    CHECK(none.out.empty());
    CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("analyze") {
    fixtures::TempDir dir;
    fixtures::write_file(dir / "essay.txt", fixtures::essay(1000, 7, 3));

    const auto csv = run({"analyze", (dir / "essay.txt").string(), "--format", "csv"});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind("sample_id,words,em,en,double_hyphen,long_hyphen_run,md_features,em_per_1k,md_per_1k\n", 0) == 0);
    CHECK(csv.out.find("essay,1000,7,0,0,0,3,7.000000,3.000000") != std::string::npos);

    const auto table = run({"analyze", (dir / "essay.txt").string()});
    CHECK(table.code == 0);
    CHECK(table.out.find("essay") != std::string::npos);

    const auto js = run({"analyze", dir.path().string(), "--format", "json"});
    REQUIRE(js.code == 0);
    CHECK(json::parse(js.out)["words"] == 1000);

    const auto missing = run({"analyze", (dir / "nope.txt").string()});
    CHECK(missing.code == 1);
    CHECK_FALSE(missing.err.empty());
}

TEST_CASE("report") {
    fixtures::TempDir dir;
    const auto store = (dir / "s.jsonl").string();
    std::vector<emdash::TextSample> samples;
    for (auto c : {emdash::Condition::unconstrained, emdash::Condition::md_suppressed})
        for (auto& s : fixtures::cell_samples("openai", "GPT-4.1", c,
                                              c == emdash::Condition::unconstrained
                                                  ? fixtures::counts_for(10.62, 6.27)
                                                  : fixtures::counts_for(9.10, 0.0)))
            samples.push_back(std::move(s));
    emdash::write_samples(emdash::SampleSet(samples, "t"), store);

    const auto t1 = run({"report", store, "--shape", "table1", "--format", "csv"});
    REQUIRE(t1.code == 0);
    CHECK(t1.out.find("GPT-4.1,openai,10.62,9.10,6.27,0.00,14%") != std::string::npos);

    const auto t2 = run({"report", "--store", store, "--shape", "table2"});
    CHECK(t2.code == 0);
    CHECK(t2.out.find("n/a") != std::string::npos);
    CHECK(t2.err.find("EM Suppr.") != std::string::npos);

    CHECK(run({"report", store, "--shape", "table2", "--format", "markdown"}).out.find("| GPT-4.1 |") !=
          std::string::npos);
    CHECK(run({"report", store, "--shape", "nope"}).code == 2);
    CHECK(run({"report", (dir / "missing.jsonl").string()}).code == 1);
}

TEST_CASE("attribute") {
    const auto r = run({"attribute", "--em-rate", "10.6"});
    REQUIRE(r.code == 0);
    const auto first = r.out.find("GPT-4.1");
    REQUIRE(first != std::string::npos);
    CHECK(first < r.out.find("Claude"));

    const auto js = run({"attribute", "--em-rate", "10.6", "--format", "json"});
    REQUIRE(js.code == 0);
    CHECK(json::parse(js.out)["ranked"][0]["model_name"] == "GPT-4.1");

    const auto zero = run({"attribute", "--em-rate", "0", "--md-rate", "0"});
    CHECK(zero.out.find("em features shared with top model") != std::string::npos);

    const auto stdin_run = run({"attribute", "-"}, fixtures::essay(1000, 10, 6));
    CHECK(stdin_run.code == 0);
    CHECK(stdin_run.out.find("GPT-4.1") != std::string::npos);

    const auto empty = run({"attribute", "-"}, "  \n");
    CHECK(empty.code == 2);
    CHECK(empty.out.empty());

    CHECK(run({"attribute", "--em-rate", "3", "--condition", "C"}).code == 2);
    CHECK(run({"attribute", "--em-rate", "3", "--with-human"}).out.find("Human baseline") != std::string::npos);

    const auto exported = run({"attribute", "--export-profiles"});
    CHECK(exported.code == 0);
    CHECK(exported.out.rfind("model_name,provider,", 0) == 0);
}

TEST_CASE("scan-dashes") {
    fixtures::TempDir dir;
    fixtures::write_file(dir / "corpus/front.md", "---\ntitle: x\n---\nBody—text\n");
    fixtures::write_file(dir / "corpus/sub/prose.txt", "A clause — and another — here.\n");
    const auto r = run({"scan-dashes", (dir / "corpus").string(), "--occurrences-dir",
                        (dir / "occ").string(), "--jobs", "2"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["structural"] == 2);
    CHECK(j["inline"] == 3);
    CHECK(j["structural_fraction"].get<double>() == doctest::Approx(0.4));
    CHECK(fixtures::slurp(dir / "occ/front.md.csv").rfind("offset,line,kind,context\n", 0) == 0);
    CHECK(std::filesystem::exists(dir / "occ/sub_prose.txt.csv"));

    fixtures::TempDir prose;
    fixtures::write_file(prose / "a.txt", "Only — prose — here.");
    CHECK(json::parse(run({"scan-dashes", prose.path().string()}).out)["structural_fraction"] == 0.0);

    fixtures::TempDir mixed;
    fixtures::write_file(mixed / "m.md", "one\n\n---\n\ntwo\n\n***\n\n---\n\n----\n\nthree — four\n");
    CHECK(json::parse(run({"scan-dashes", mixed.path().string()}).out)["structural_fraction"] == 0.75);

    fixtures::TempDir empty;
    CHECK(run({"scan-dashes", empty.path().string()}).code == 1);
}

TEST_CASE("run") {
    fixtures::TempDir dir;
    const auto store = (dir / "s.jsonl").string();
    const auto full = run({"run", "--config", config_path("gradient.json"), "--mock", "--store", store});
    REQUIRE(full.code == 0);
    const auto summary = json::parse(full.out);
    CHECK(summary["cells"] == 120);
    CHECK(summary["completed"] == 120);

    const auto again = run({"run", "--config", config_path("gradient.json"), "--mock", "--store", store});
    CHECK(again.code == 0);
    CHECK(json::parse(again.out)["generate_calls"] == 0);

    SUBCASE("interrupted then resumed") {
        const auto part_store = (dir / "p.jsonl").string();
        const auto part = run({"run", "--config", config_path("gradient.json"), "--mock", "--store",
                               part_store, "--max-cells", "7"});
        CHECK(part.code == 3);
        CHECK(json::parse(part.out)["generate_calls"] == 7);
        const auto rest = run({"run", "--config", config_path("gradient.json"), "--mock", "--store", part_store});
        CHECK(rest.code == 0);
        CHECK(json::parse(rest.out)["generate_calls"] == 113);
    }
    SUBCASE("bad config") {
        fixtures::write_file(dir / "bad.json",
                             R"({"models": [{"provider": "openai", "model_name": "M"}], "topics": [], "conditions": ["A"]})");
        const auto bad = run({"run", "--config", (dir / "bad.json").string(), "--mock"});
        CHECK(bad.code == 2);
        CHECK(bad.err.find("topics") != std::string::npos);
    }
    SUBCASE("hosted providers need credentials from the environment") {
        fixtures::write_file(dir / "hosted.json",
                             R"({"models": [{"provider": "openai", "model_name": "M"}], "topics": ["t"], "conditions": ["A"]})");
        const auto r = run({"run", "--config", (dir / "hosted.json").string(), "--store",
                            (dir / "h.jsonl").string()});
        if (!std::getenv("OPENAI_API_KEY")) {
            CHECK(r.code == 2);
            CHECK(r.err.find("OPENAI_API_KEY") != std::string::npos);
        }
    }
}

TEST_CASE("baseline") {
    fixtures::TempDir dir;
    fixtures::write_file(dir / "a.txt", fixtures::essay(1000, 2));
    fixtures::write_file(dir / "b.txt", fixtures::essay(1000, 4));
    const auto r = run({"baseline", dir.path().string(), "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["measured"]["essays"] == 2);
    CHECK(j["reference"]["essays"] == 8);
}
