// emdash: dash and markdown metrics, gradient reports, attribution and
// sample collection from one command line.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "emdash/attribution.hpp"
#include "emdash/corpus.hpp"
#include "emdash/dashcontext.hpp"
#include "emdash/error.hpp"
#include "emdash/harness.hpp"
#include "emdash/report.hpp"
#include "emdash/suppression.hpp"
#include "emdash/textmetrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emdash;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, partial = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string format;
    std::string store;
    std::string profiles;
    std::uint64_t seed = 0;
};

void diag(const std::string& msg) { std::cerr << "emdash: " << msg << '\n'; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

// The first `left` columns are left-aligned, the rest right-aligned.
void print_table(std::ostream& os, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows, std::size_t left = 1) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c)
            width[c] = std::max(width[c], r[c].size());
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            const std::string& v = c < r.size() ? r[c] : std::string();
            const std::string pad(width[c] - v.size(), ' ');
            if (c) os << "  ";
            os << (c < left ? v + pad : pad + v);
        }
        os << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& r : rows) line(r);
}

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", places, v);
    return buf;
}

std::vector<fs::path> regular_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::optional<Condition> condition_flag(const std::string& s) {
    if (s.empty() || s == "any") return std::nullopt;
    const auto c = parse_condition(s);
    if (!c) throw UsageError("unknown condition '" + s + "' (use A, B, C or any)");
    return c;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
    std::vector<std::string> paths;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
    const std::string format = g.format.empty() ? "table" : g.format;
    if (format != "table" && format != "csv" && format != "json")
        throw UsageError("analyze supports --format table, csv or json");

    auto paths = a.paths;
    if (paths.empty() && !g.store.empty()) paths.push_back(g.store);
    if (paths.empty()) throw UsageError("analyze needs at least one input");

    int status = ok;
    std::vector<MetricsRecord> records;
    auto add = [&](const std::string& id, const std::string& text) {
        try {
            records.push_back(analyze_text(id, text));
        } catch (const Error& e) {
            diag(e.what());
            status = failure;
        }
    };

    for (const auto& p : paths) {
        try {
            if (fs::is_directory(p)) {
                for (const auto& s : ingest_plaintext(p)) add(s.id, s.text);
            } else if (fs::path(p).extension() == ".jsonl") {
                auto loaded = load_samples(p);
                for (const auto& d : loaded.diagnostics) diag(p + ": " + d);
                for (const auto& s : loaded.set) add(s.id, s.text);
            } else {
                add(fs::path(p).stem().string(), read_file(p));
            }
        } catch (const Error& e) {
            diag(p + ": " + e.what());
            status = failure;
        }
    }

    if (format == "json") {
        for (const auto& r : records) std::cout << to_json(r).dump() << '\n';
    } else if (format == "csv") {
        std::cout << "sample_id,words,em,en,double_hyphen,long_hyphen_run,md_features,"
                     "em_per_1k,md_per_1k\n";
        for (const auto& r : records)
            std::cout << csv_field(r.sample_id) << ',' << r.words << ',' << r.dash.em << ','
                      << r.dash.en << ',' << r.dash.double_hyphen << ',' << r.dash.long_hyphen_run
                      << ',' << r.md_features.taxonomy_total() << ',' << fixed(r.em_per_1k, 6)
                      << ',' << fixed(r.md_per_1k, 6) << '\n';
    } else {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : records)
            rows.push_back({r.sample_id, std::to_string(r.words), std::to_string(r.dash.em),
                            std::to_string(r.dash.en), std::to_string(r.dash.double_hyphen),
                            std::to_string(r.md_features.taxonomy_total()),
                            format_rate(r.em_per_1k), format_rate(r.md_per_1k)});
        print_table(std::cout, {"Sample", "Words", "Em", "En", "--", "MD", "Em/1K", "MD/1K"}, rows);
    }
    return status;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string store;
    std::string shape = "table1";
};

int cmd_report(const Globals& g, const ReportArgs& a) {
    const std::string store = !a.store.empty() ? a.store : g.store;
    if (store.empty()) throw UsageError("report needs a sample store (positional or --store)");

    std::string fmt = g.format.empty() ? "text" : g.format;
    const auto format = parse_report_format(fmt);
    if (!format) throw UsageError("report supports --format text, csv or markdown");

    ReportShape shape;
    const auto names = builtin_shape_names();
    if (std::find(names.begin(), names.end(), a.shape) != names.end()) {
        shape = builtin_shape(a.shape);
    } else if (fs::is_regular_file(a.shape)) {
        try {
            shape = shape_from_json(json::parse(read_file(a.shape)));
        } catch (const json::exception& e) {
            throw UsageError(a.shape + ": " + e.what());
        }
    } else {
        throw UsageError("unknown shape '" + a.shape + "'");
    }

    auto loaded = load_samples(store);
    for (const auto& d : loaded.diagnostics) diag(store + ": " + d);
    const auto summaries = aggregate_all(loaded.set);
    if (summaries.empty())
        throw Error(ErrorKind::empty_set, store + " has no model samples with a condition");
    const auto report = gradient_report(summaries, shape);
    for (const auto& cell : report.absent)
        diag("absent cell: " + cell.model_name + " / " + cell.column);
    std::cout << render(report, *format);
    return ok;
}

// ---------------------------------------------------------------------------
// attribute

struct AttributeArgs {
    std::string input;
    std::string condition;
    std::optional<double> em_rate;
    std::optional<double> md_rate;
    bool export_profiles = false;
    bool with_human = false;
};

int cmd_attribute(const Globals& g, const AttributeArgs& a) {
    std::vector<ModelProfile> profiles =
        g.profiles.empty() ? builtin_profiles() : load_profiles_csv(g.profiles);

    if (a.export_profiles) {
        std::cout << profiles_to_csv(profiles);
        return ok;
    }

    const auto known = condition_flag(a.condition);
    if (known == Condition::em_suppressed)
        throw UsageError("profiles only describe conditions A and B");
    AttributionQuery query{};
    if (a.em_rate) {
        if (!a.input.empty()) throw UsageError("give either an input or --em-rate, not both");
        query = query_from_rates(*a.em_rate, a.md_rate, known);
    } else {
        if (a.input.empty()) throw UsageError("attribute needs an input file, '-' or --em-rate");
        std::string text;
        if (a.input == "-") {
            text.assign(std::istreambuf_iterator<char>(std::cin), {});
        } else {
            text = read_file(a.input);
        }
        if (count_words(text) == 0) throw UsageError("input has no words to measure");
        query = query_from_metrics(analyze_text(a.input, text), known);
    }

    const auto scaling = FeatureScaling::fit(profiles);
    if (a.with_human) profiles.push_back(human_baseline_profile());
    const auto result = g.profiles.empty() && !a.with_human
                            ? attribute(query, profiles, known)
                            : attribute(query, profiles, scaling, known);

    const std::string format = g.format.empty() ? "table" : g.format;
    if (format == "json") {
        std::cout << to_json(result).dump(2) << '\n';
        return ok;
    }
    if (format != "table") throw UsageError("attribute supports --format table or json");
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        const auto& m = result.ranked[i];
        rows.push_back({std::to_string(i + 1), m.model_name, m.provider, fixed(m.distance, 4),
                        fixed(m.normalized_score, 4)});
    }
    print_table(std::cout, {"Rank", "Model", "Provider", "Distance", "Score"}, rows, 3);
    for (const auto& group : result.ties) {
        std::cout << "tie:";
        for (const auto& n : group) std::cout << ' ' << n << ';';
        std::cout << '\n';
    }
    if (!result.em_feature_tie.empty()) {
        std::cout << "em features shared with top model:";
        for (const auto& n : result.em_feature_tie) std::cout << ' ' << n << ';';
        std::cout << '\n';
    }
    return ok;
}

// ---------------------------------------------------------------------------
// scan-dashes

struct ScanArgs {
    std::string dir;
    std::string occurrences_dir;
    unsigned jobs = 0;
};

std::string occurrence_csv(const std::vector<DashOccurrence>& occ) {
    std::string out = "offset,line,kind,context\n";
    for (const auto& o : occ)
        out += std::to_string(o.byte_offset) + ',' + std::to_string(o.line) + ',' +
               std::string(to_string(o.kind)) + ',' + std::string(to_string(o.context)) + '\n';
    return out;
}

int cmd_scan(const Globals& g, const ScanArgs& a) {
    if (!fs::is_directory(a.dir)) throw Error(ErrorKind::input, a.dir + " is not a directory");
    const auto files = regular_files(a.dir);
    if (files.empty()) throw Error(ErrorKind::empty_set, a.dir + " contains no files");
    if (!a.occurrences_dir.empty()) fs::create_directories(a.occurrences_dir);

    std::vector<ContextSummary> per_file(files.size());
    std::vector<std::string> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < files.size();) {
            try {
                const auto occ = scan(read_file(files[i]));
                per_file[i] = summarize(occ);
                if (!a.occurrences_dir.empty()) {
                    auto name = fs::relative(files[i], a.dir).string();
                    std::replace(name.begin(), name.end(), '/', '_');
                    std::ofstream out(fs::path(a.occurrences_dir) / (name + ".csv"),
                                      std::ios::binary);
                    out << occurrence_csv(occ);
                    if (!out) errors[i] = "cannot write occurrences for " + files[i].string();
                }
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned jobs =
        std::max(1u, std::min<unsigned>(a.jobs ? a.jobs : std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(files.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work);
    }

    int status = ok;
    ContextSummary total;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!errors[i].empty()) {
            diag(errors[i]);
            status = failure;
            continue;
        }
        total = merge(total, per_file[i]);
    }

    const std::string format = g.format.empty() ? "json" : g.format;
    if (format == "json") {
        auto j = to_json(total);
        j["files"] = files.size();
        std::cout << j.dump(2) << '\n';
    } else if (format == "table") {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < dash_kind_count; ++k) {
            const auto kind = static_cast<DashKind>(k);
            rows.push_back({std::string(to_string(kind)), std::to_string(total.of(kind).structural),
                            std::to_string(total.of(kind).inline_)});
        }
        rows.push_back({"total", std::to_string(total.structural), std::to_string(total.inline_)});
        print_table(std::cout, {"Kind", "Structural", "Inline"}, rows);
        const auto f = total.structural_fraction();
        std::cout << "structural fraction: " << (f ? fixed(*f, 4) : std::string("n/a")) << '\n';
    } else {
        throw UsageError("scan-dashes supports --format json or table");
    }
    return status;
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
    std::string config;
    bool mock = false;
    std::optional<double> mock_em;
    std::optional<double> mock_md;
    std::optional<std::size_t> max_cells;
};

int cmd_run(const Globals& g, const RunArgs& a) {
    RunConfig config;
    RunPlan plan;
    try {
        config = load_run_config(a.config);
        if (!g.store.empty()) config.store_path = g.store;
        if (a.mock_em) config.mock_em_per_1k = *a.mock_em;
        if (a.mock_md) config.mock_md_per_1k = *a.mock_md;
        plan = plan_run(config);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    std::map<std::string, std::unique_ptr<ProviderClient>> owned;
    std::map<std::string, ProviderClient*> clients;
    const auto env = process_environment();
    for (const auto& m : plan.models) {
        if (owned.count(m.provider)) continue;
        if (a.mock) {
            owned[m.provider] = mock_client(config.mock_em_per_1k, config.mock_md_per_1k, g.seed);
        } else {
            const auto it = config.providers.find(m.provider);
            try {
                owned[m.provider] = http_client(resolve_endpoint(
                    m.provider, it == config.providers.end() ? nullptr : &it->second, env));
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
        }
        clients[m.provider] = owned[m.provider].get();
    }

    const auto state_path = state_path_for(config.store_path);
    auto state = load_or_create_state(state_path, plan);
    const auto resumed = state.completed.size();
    if (resumed) diag("resuming: " + std::to_string(resumed) + " cell(s) already complete");

    SampleAppender store(config.store_path);
    ExecuteOptions opt;
    opt.concurrency = config.concurrency;
    opt.requests_per_second = a.mock ? 0.0 : config.requests_per_second;
    opt.retry = config.retry;
    opt.state_path = state_path;
    opt.cell_limit = a.max_cells;
    const auto rep = execute(plan, clients, store, state, opt);

    for (const auto& [key, reason] : state.failed) diag("failed " + key + ": " + reason);
    const bool complete = state.completed.size() == plan.cell_count();
    json summary = {{"plan_hash", plan.hash()},
                    {"cells", plan.cell_count()},
                    {"completed", state.completed.size()},
                    {"failed", state.failed.size()},
                    {"generate_calls", rep.generate_calls},
                    {"collected", rep.collected.size()},
                    {"truncated", rep.truncated},
                    {"store", config.store_path.string()},
                    {"state", state_path.string()}};
    std::cout << summary.dump(2) << '\n';
    return complete ? ok : partial;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineArgs {
    std::string dir;
};

int cmd_baseline(const Globals& g, const BaselineArgs& a) {
    if (!fs::is_directory(a.dir)) throw Error(ErrorKind::input, a.dir + " is not a directory");
    const auto stats = human_baseline_stats(ingest_plaintext(a.dir));
    const auto& ref = reference_human_baseline;

    const std::string format = g.format.empty() ? "table" : g.format;
    if (format == "json") {
        json j = {{"measured",
                   {{"essays", stats.essays},
                    {"total_words", stats.total_words},
                    {"total_em", stats.total_em},
                    {"weighted_mean_per_1k", stats.weighted_mean_per_1k},
                    {"median_per_1k", stats.median_per_1k},
                    {"min_per_1k", stats.min_per_1k},
                    {"max_per_1k", stats.max_per_1k}}},
                  {"reference",
                   {{"essays", ref.essays},
                    {"total_words", ref.total_words},
                    {"weighted_mean_per_1k", ref.weighted_mean_per_1k},
                    {"median_per_1k", ref.median_per_1k},
                    {"min_per_1k", ref.min_per_1k},
                    {"max_per_1k", ref.max_per_1k}}}};
        std::cout << j.dump(2) << '\n';
        return ok;
    }
    if (format != "table") throw UsageError("baseline supports --format table or json");
    print_table(std::cout, {"Statistic", "Measured", "Reference"},
                {{"essays", std::to_string(stats.essays), std::to_string(ref.essays)},
                 {"words", std::to_string(stats.total_words), std::to_string(ref.total_words)},
                 {"mean em/1K", format_rate(stats.weighted_mean_per_1k),
                  format_rate(ref.weighted_mean_per_1k)},
                 {"median em/1K", format_rate(stats.median_per_1k), format_rate(ref.median_per_1k)},
                 {"min em/1K", format_rate(stats.min_per_1k), format_rate(ref.min_per_1k)},
                 {"max em/1K", format_rate(stats.max_per_1k), format_rate(ref.max_per_1k)}});
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Em dash and markdown register metrics for generated text"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "emdash 0.3.0");

    Globals g;
    app.add_option("--format", g.format, "Output format: table, text, csv, json, markdown")
        ->check(CLI::IsMember({"table", "text", "csv", "json", "markdown"}));
    app.add_option("--store", g.store, "Sample store (JSONL)");
    app.add_option("--profiles", g.profiles, "Model profile table (CSV)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed for the mock provider");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Per-sample dash and markdown metrics");
    analyze_cmd->add_option("paths", analyze.paths, "Text files, directories or .jsonl stores");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Per-model, per-condition gradient table");
    report_cmd->add_option("store", report.store, "Sample store (JSONL)");
    report_cmd->add_option("--shape", report.shape, "table1, table2, table3 or a JSON shape file");

    AttributeArgs attr;
    auto* attr_cmd = app.add_subcommand("attribute", "Rank model profiles against a text");
    attr_cmd->add_option("input", attr.input, "Text file, or '-' for standard input");
    attr_cmd->add_option("--condition", attr.condition, "Known prompt condition: A, B or any");
    attr_cmd->add_option("--em-rate", attr.em_rate, "Query em dashes per 1K words");
    attr_cmd->add_option("--md-rate", attr.md_rate, "Query markdown features per 1K words")
        ->needs(attr_cmd->get_option("--em-rate"));
    attr_cmd->add_flag("--export-profiles", attr.export_profiles, "Print the profile table as CSV");
    attr_cmd->add_flag("--with-human", attr.with_human, "Rank the human baseline too");

    ScanArgs scan_args;
    auto* scan_cmd = app.add_subcommand("scan-dashes", "Classify dash contexts across a corpus");
    scan_cmd->add_option("dir", scan_args.dir, "Corpus directory")->required();
    scan_cmd->add_option("--occurrences-dir", scan_args.occurrences_dir,
                         "Write one offset,line,kind,context CSV per file here");
    scan_cmd->add_option("--jobs", scan_args.jobs, "Worker threads (default: hardware)");

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Collect samples as described by a run config");
    run_cmd->add_option("--config", run.config, "Run config (JSON)")->required();
    run_cmd->add_flag("--mock", run.mock, "Use the deterministic mock provider");
    run_cmd->add_option("--mock-em", run.mock_em, "Mock em dashes per 1K words");
    run_cmd->add_option("--mock-md", run.mock_md, "Mock markdown features per 1K words");
    run_cmd->add_option("--max-cells", run.max_cells, "Stop after attempting this many cells");

    BaselineArgs baseline;
    auto* baseline_cmd = app.add_subcommand("baseline", "Human essay em dash statistics");
    baseline_cmd->add_option("dir", baseline.dir, "Directory of plain-text essays")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(g, analyze);
        if (report_cmd->parsed()) return cmd_report(g, report);
        if (attr_cmd->parsed()) return cmd_attribute(g, attr);
        if (scan_cmd->parsed()) return cmd_scan(g, scan_args);
        if (run_cmd->parsed()) return cmd_run(g, run);
        if (baseline_cmd->parsed()) return cmd_baseline(g, baseline);
    } catch (const UsageError& e) {
        diag(e.what());
        return usage;
    } catch (const std::exception& e) {
        diag(e.what());
        return failure;
    }
    return usage;
}
