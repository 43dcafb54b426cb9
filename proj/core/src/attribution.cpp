#include "emdash/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "emdash/error.hpp"

namespace emdash {

const std::vector<ModelProfile>& builtin_profiles() {
    // Em dashes and markdown features per 1K words, unconstrained then
    // prose-constrained, sorted by unconstrained em rate.
    static const std::vector<ModelProfile> table{
        {"GPT-4.1", "OpenAI", 10.62, 9.10, 6.27, 0.0},
        {"Claude Opus 4.6", "Anthropic", 9.09, 0.19, 0.96, 0.0},
        {"Claude Sonnet 4", "Anthropic", 8.29, 1.31, 6.15, 0.0},
        {"Claude Haiku 3.5", "Anthropic", 7.51, 0.18, 5.36, 0.9},
        {"DeepSeek V3", "DeepSeek", 6.95, 5.41, 1.47, 0.0},
        {"GPT-4o Mini", "OpenAI", 4.16, 4.23, 6.03, 0.0},
        {"GPT-4o", "OpenAI", 4.12, 2.68, 5.38, 0.0},
        {"Gemini 2.5 Pro", "Google", 3.53, 0.00, 0.85, 0.0},
        {"GPT-5.4", "OpenAI", 1.43, 0.29, 0.00, 0.0},
        {"Gemini 2.5 Flash", "Google", 1.28, 1.48, 1.06, 0.0},
        {"Llama 3.1 8B Inst.", "Meta", 0.00, 0.00, 1.91, 0.0},
        {"Llama 3.3 70B Inst.", "Meta", 0.00, 0.00, 0.00, 0.0},
    };
    return table;
}

const ModelProfile& human_baseline_profile() {
    static const ModelProfile human{"Human baseline", "", 3.23, 3.23, std::nullopt, std::nullopt};
    return human;
}

namespace {

constexpr const char* profile_header =
    "model_name,provider,em_unconstrained,em_constrained,md_unconstrained,md_constrained";

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::optional<double> parse_rate(const std::string& field, std::size_t line_no) {
    if (field.empty()) return std::nullopt;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != field.size() || !std::isfinite(v) || v < 0)
        throw Error(ErrorKind::input, "profile line " + std::to_string(line_no) +
                                          ": bad rate '" + field + "'");
    return v;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string rate_field(const std::optional<double>& v) {
    if (!v) return {};
    std::ostringstream os;
    os << *v;
    return os.str();
}

// Features compared under a known condition: em/md pair of that condition.
std::array<bool, feature_count> considered(std::optional<Condition> known) {
    if (!known) return {true, true, true, true};
    switch (*known) {
        case Condition::unconstrained: return {true, false, true, false};
        case Condition::md_suppressed: return {false, true, false, true};
        case Condition::em_suppressed: break;
    }
    throw Error(ErrorKind::validation,
                "profiles carry no features for the em-suppressed condition");
}

}  // namespace

std::vector<ModelProfile> parse_profiles_csv(std::string_view csv) {
    std::vector<ModelProfile> out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    bool header = true;
    while (start < csv.size()) {
        auto end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        auto line = csv.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line != profile_header)
                throw Error(ErrorKind::input, std::string("profile csv header must be ") +
                                                  profile_header);
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 6 || f[0].empty())
            throw Error(ErrorKind::input, "profile line " + std::to_string(line_no) +
                                              ": expected 6 fields with a model name");
        out.push_back({f[0], f[1], parse_rate(f[2], line_no), parse_rate(f[3], line_no),
                       parse_rate(f[4], line_no), parse_rate(f[5], line_no)});
    }
    if (out.empty()) throw Error(ErrorKind::empty_set, "profile csv has no rows");
    return out;
}

std::vector<ModelProfile> load_profiles_csv(const std::filesystem::path& path) {
    return parse_profiles_csv(read_file(path));
}

std::string profiles_to_csv(const std::vector<ModelProfile>& profiles) {
    std::string out = std::string(profile_header) + "\n";
    for (const auto& p : profiles) {
        out += quote(p.model_name) + "," + quote(p.provider) + "," + rate_field(p.em_unconstrained) +
               "," + rate_field(p.em_constrained) + "," + rate_field(p.md_unconstrained) + "," +
               rate_field(p.md_constrained) + "\n";
    }
    return out;
}

FeatureVector features_of(const ModelProfile& p) noexcept {
    return {p.em_unconstrained, p.em_constrained, p.md_unconstrained, p.md_constrained};
}

AttributionQuery query_from_rates(double em_per_1k, std::optional<double> md_per_1k,
                                  std::optional<Condition> known_condition) {
    AttributionQuery q{};
    const bool a = !known_condition || *known_condition == Condition::unconstrained;
    const bool b = !known_condition || *known_condition == Condition::md_suppressed;
    if (a) {
        q[0] = em_per_1k;
        q[2] = md_per_1k;
    }
    if (b) {
        q[1] = em_per_1k;
        q[3] = md_per_1k;
    }
    return q;
}

AttributionQuery query_from_metrics(const MetricsRecord& m,
                                    std::optional<Condition> known_condition) {
    return query_from_rates(m.em_per_1k, m.md_per_1k, known_condition);
}

FeatureScaling FeatureScaling::fit(const std::vector<ModelProfile>& profiles) {
    FeatureScaling s;
    for (std::size_t f = 0; f < feature_count; ++f) {
        std::vector<double> values;
        for (const auto& p : profiles)
            if (const auto v = features_of(p)[f]) values.push_back(*v);
        if (values.empty()) {
            s.mean[f] = 0;
            s.stddev[f] = 1;
            continue;
        }
        const double n = static_cast<double>(values.size());
        const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
        double ss = 0;
        for (double v : values) ss += (v - mean) * (v - mean);
        s.mean[f] = mean;
        s.stddev[f] = ss > 0 ? std::sqrt(ss / n) : 1.0;
    }
    return s;
}

double FeatureScaling::z(std::size_t feature, double value) const noexcept {
    return (value - mean[feature]) / stddev[feature];
}

double distance(const AttributionQuery& query, const ModelProfile& profile,
                const FeatureScaling& scaling, std::optional<Condition> known_condition) {
    const auto mask = considered(known_condition);
    const auto pf = features_of(profile);
    std::size_t considered_n = 0;
    std::size_t used = 0;
    double ss = 0;
    for (std::size_t f = 0; f < feature_count; ++f) {
        if (!mask[f]) continue;
        ++considered_n;
        if (!query[f] || !pf[f]) continue;
        ++used;
        const double d = scaling.z(f, *query[f]) - scaling.z(f, *pf[f]);
        ss += d * d;
    }
    if (used == 0)
        throw Error(ErrorKind::validation,
                    "query shares no usable feature with profile '" + profile.model_name + "'");
    return std::sqrt(ss * static_cast<double>(considered_n) / static_cast<double>(used));
}

AttributionResult attribute(const AttributionQuery& query,
                            const std::vector<ModelProfile>& profiles,
                            std::optional<Condition> known_condition) {
    return attribute(query, profiles, FeatureScaling::fit(builtin_profiles()), known_condition);
}

AttributionResult attribute(const AttributionQuery& query,
                            const std::vector<ModelProfile>& profiles,
                            const FeatureScaling& scaling,
                            std::optional<Condition> known_condition) {
    if (profiles.empty()) throw Error(ErrorKind::validation, "no profiles to attribute against");

    AttributionResult r;
    r.query_echo = query;
    r.known_condition = known_condition;

    std::vector<std::size_t> index(profiles.size());
    std::vector<double> dist(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        index[i] = i;
        dist[i] = distance(query, profiles[i], scaling, known_condition);
    }
    std::stable_sort(index.begin(), index.end(),
                     [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    double weight_sum = 0;
    for (auto i : index) weight_sum += std::exp(-(dist[i] - dist[index.front()]));
    for (auto i : index) {
        r.ranked.push_back({profiles[i].model_name, profiles[i].provider, dist[i],
                            std::exp(-(dist[i] - dist[index.front()])) / weight_sum});
    }

    for (std::size_t i = 0; i < r.ranked.size();) {
        std::size_t j = i + 1;
        while (j < r.ranked.size() && r.ranked[j].distance == r.ranked[i].distance) ++j;
        if (j - i > 1) {
            std::vector<std::string> group;
            for (std::size_t k = i; k < j; ++k) group.push_back(r.ranked[k].model_name);
            r.ties.push_back(std::move(group));
        }
        i = j;
    }

    // Profiles indistinguishable from the leader on the compared em features.
    const auto mask = considered(known_condition);
    const auto& top = profiles[index.front()];
    const auto top_f = features_of(top);
    for (auto i : index) {
        const auto f = features_of(profiles[i]);
        bool same = true;
        bool any = false;
        for (std::size_t k : {std::size_t{0}, std::size_t{1}}) {
            if (!mask[k] || !query[k]) continue;
            any = true;
            if (f[k] != top_f[k]) same = false;
        }
        if (any && same) r.em_feature_tie.push_back(profiles[i].model_name);
    }
    if (r.em_feature_tie.size() < 2) r.em_feature_tie.clear();
    return r;
}

std::optional<double> suppression_resistance(const ModelProfile& profile) {
    if (!profile.em_unconstrained || !profile.em_constrained || *profile.em_unconstrained <= 0)
        return std::nullopt;
    return *profile.em_constrained / *profile.em_unconstrained;
}

nlohmann::json to_json(const AttributionResult& r) {
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& m : r.ranked)
        ranked.push_back({{"model_name", m.model_name},
                          {"provider", m.provider},
                          {"distance", m.distance},
                          {"normalized_score", m.normalized_score}});
    nlohmann::json query = nlohmann::json::object();
    const char* names[] = {"em_unconstrained", "em_constrained", "md_unconstrained",
                           "md_constrained"};
    for (std::size_t f = 0; f < feature_count; ++f)
        query[names[f]] = r.query_echo[f] ? nlohmann::json(*r.query_echo[f]) : nlohmann::json(nullptr);
    return {{"ranked", ranked},
            {"query", query},
            {"known_condition", r.known_condition ? nlohmann::json(std::string(to_string(*r.known_condition)))
                                                  : nlohmann::json(nullptr)},
            {"ties", r.ties},
            {"em_feature_tie", r.em_feature_tie}};
}

}  // namespace emdash
