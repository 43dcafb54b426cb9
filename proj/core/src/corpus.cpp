#include "emdash/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "emdash/error.hpp"

namespace emdash {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Source s) noexcept { return s == Source::model ? "model" : "human"; }

std::string format_timestamp(Timestamp t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, consumed = 0;
    const std::string str(s);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &sec,
                    &consumed) != 6)
        throw Error(ErrorKind::validation, "bad timestamp '" + str + "'");
    std::string_view rest = s.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') rest.remove_prefix(1);
    }
    std::chrono::minutes offset{0};
    if (rest == "Z" || rest == "z" || rest.empty()) {
    } else if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
        const int oh = std::stoi(std::string(rest.substr(1, 2)));
        const int om = std::stoi(std::string(rest.substr(4, 2)));
        offset = std::chrono::minutes(oh * 60 + om);
        if (rest.front() == '-') offset = -offset;
    } else {
        throw Error(ErrorKind::validation, "bad timestamp zone in '" + str + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(mo),
                                          std::chrono::day(d)};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60)
        throw Error(ErrorKind::validation, "bad timestamp '" + str + "'");
    return std::chrono::sys_days(ymd) + std::chrono::hours(h) + std::chrono::minutes(mi) +
           std::chrono::seconds(sec) - offset;
}

Timestamp now_utc() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

namespace {

json optional_string(const std::optional<std::string>& s) {
    return s ? json(*s) : json(nullptr);
}

std::optional<std::string> read_optional_string(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(ErrorKind::validation, std::string(key) + " must be a string");
    return it->get<std::string>();
}

const std::set<std::string>& schema_fields() {
    static const std::set<std::string> fields{"id",        "text",         "source",
                                              "provider",  "model_name",   "condition",
                                              "topic",     "target_words", "collected_at",
                                              "generation_params"};
    return fields;
}

}  // namespace

json to_json(const TextSample& s) {
    json j;
    j["id"] = s.id;
    j["text"] = s.text;
    j["source"] = std::string(to_string(s.source));
    j["provider"] = optional_string(s.provider);
    j["model_name"] = optional_string(s.model_name);
    j["condition"] = s.condition ? std::string(to_string(*s.condition)) : std::string("none");
    j["topic"] = optional_string(s.topic);
    j["target_words"] = s.target_words ? json(*s.target_words) : json(nullptr);
    j["collected_at"] = format_timestamp(s.collected_at);
    j["generation_params"] =
        s.generation_params.is_object() && !s.generation_params.empty() ? s.generation_params
                                                                        : json(nullptr);
    return j;
}

TextSample sample_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::validation, "record is not an object");
    for (const auto& [key, _] : j.items())
        if (!schema_fields().contains(key))
            throw Error(ErrorKind::validation, "unknown field '" + key + "'");

    TextSample s;
    const auto id = j.find("id");
    if (id == j.end() || !id->is_string() || id->get<std::string>().empty())
        throw Error(ErrorKind::validation, "id must be a non-empty string");
    s.id = id->get<std::string>();

    const auto text = j.find("text");
    if (text == j.end() || !text->is_string())
        throw Error(ErrorKind::validation, "text must be a string");
    s.text = text->get<std::string>();

    const auto source = j.find("source");
    if (source == j.end() || !source->is_string())
        throw Error(ErrorKind::validation, "source must be a string");
    if (*source == "model")
        s.source = Source::model;
    else if (*source == "human")
        s.source = Source::human;
    else
        throw Error(ErrorKind::validation, "source must be 'model' or 'human'");

    s.provider = read_optional_string(j, "provider");
    s.model_name = read_optional_string(j, "model_name");
    s.topic = read_optional_string(j, "topic");

    if (const auto cond = read_optional_string(j, "condition"); cond && *cond != "none") {
        s.condition = parse_condition(*cond);
        if (!s.condition || cond->size() == 1)
            throw Error(ErrorKind::validation, "unknown condition '" + *cond + "'");
    }

    if (const auto tw = j.find("target_words"); tw != j.end() && !tw->is_null()) {
        if (!tw->is_number_integer() || tw->get<long long>() <= 0)
            throw Error(ErrorKind::validation, "target_words must be a positive integer");
        s.target_words = tw->get<int>();
    }

    const auto at = j.find("collected_at");
    if (at == j.end() || !at->is_string())
        throw Error(ErrorKind::validation, "collected_at must be an ISO-8601 string");
    s.collected_at = parse_timestamp(at->get<std::string>());

    if (const auto gp = j.find("generation_params"); gp != j.end() && !gp->is_null()) {
        if (!gp->is_object())
            throw Error(ErrorKind::validation, "generation_params must be an object");
        if (!gp->empty()) s.generation_params = *gp;
    }
    return s;
}

std::vector<std::string> validate_sample(const TextSample& s) {
    std::vector<std::string> issues;
    if (s.id.empty()) issues.emplace_back("empty id");
    if (s.text.empty()) issues.emplace_back("empty text");
    if (s.source == Source::human) {
        if (s.condition) issues.emplace_back("human sample has a condition");
        if (s.provider) issues.emplace_back("human sample has a provider");
        if (s.model_name) issues.emplace_back("human sample has a model_name");
    } else {
        if (!s.provider) issues.emplace_back("missing provider");
        if (!s.model_name) issues.emplace_back("missing model_name");
        if (!s.condition) issues.emplace_back("missing condition");
        if (!s.topic) issues.emplace_back("missing topic");
    }
    if (s.target_words && *s.target_words <= 0) issues.emplace_back("non-positive target_words");
    return issues;
}

SampleSet::SampleSet(std::vector<TextSample> samples, std::string provenance)
    : samples_(std::move(samples)), provenance_(std::move(provenance)) {
    std::set<std::string_view> seen;
    for (const auto& s : samples_)
        if (!seen.insert(s.id).second)
            throw Error(ErrorKind::validation, "duplicate sample id '" + s.id + "'");
}

const TextSample* SampleSet::find(std::string_view id) const noexcept {
    const auto it = std::find_if(samples_.begin(), samples_.end(),
                                 [&](const TextSample& s) { return s.id == id; });
    return it == samples_.end() ? nullptr : &*it;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::input, "read failed for " + path.string());
    return std::move(buf).str();
}

LoadResult load_samples(const fs::path& path) {
    if (fs::is_directory(path)) throw Error(ErrorKind::input, path.string() + " is a directory");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot read " + path.string());

    LoadResult result;
    std::vector<TextSample> samples;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            auto sample = sample_from_json(json::parse(line));
            if (!ids.insert(sample.id).second)
                throw Error(ErrorKind::validation, "duplicate id '" + sample.id + "'");
            samples.push_back(std::move(sample));
        } catch (const std::exception& e) {
            ++result.skipped;
            result.diagnostics.push_back(path.string() + ":" + std::to_string(line_no) + ": " +
                                         e.what());
        }
    }
    if (in.bad()) throw Error(ErrorKind::input, "read failed for " + path.string());
    if (samples.empty())
        throw Error(ErrorKind::empty_set, "no well-formed samples in " + path.string());
    result.set = SampleSet(std::move(samples), path.string());
    return result;
}

std::string to_jsonl(const SampleSet& set) {
    std::string out;
    for (const auto& s : set) {
        out += to_json(s).dump();
        out += '\n';
    }
    return out;
}

void write_samples(const SampleSet& set, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::input, "cannot write " + path.string());
    out << to_jsonl(set);
    if (!out) throw Error(ErrorKind::input, "write failed for " + path.string());
}

SampleSet ingest_plaintext(const fs::path& directory, const IngestMetadata& metadata) {
    if (metadata.source == Source::model)
        throw Error(ErrorKind::validation, "plaintext ingestion produces human samples only");
    if (metadata.provider || metadata.model_name || metadata.condition)
        throw Error(ErrorKind::validation,
                    "human samples carry no provider, model_name, or condition");

    std::error_code ec;
    if (!fs::is_directory(directory, ec))
        throw Error(ErrorKind::input, directory.string() + " is not a readable directory");

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (name.empty() || name.front() == '.') continue;
        files.push_back(entry.path());
    }
    if (files.empty())
        throw Error(ErrorKind::empty_set, "no text files in " + directory.string());
    std::sort(files.begin(), files.end());

    std::map<std::string, int> stem_uses;
    std::set<std::string> taken;
    std::vector<TextSample> samples;
    samples.reserve(files.size());
    for (const auto& file : files) {
        const auto stem = file.stem().string();
        std::string id = stem;
        int& uses = stem_uses[stem];
        while (taken.contains(id)) id = stem + "-" + std::to_string(++uses + 1);
        taken.insert(id);

        TextSample s;
        s.id = std::move(id);
        s.text = read_file(file);
        s.source = Source::human;
        s.topic = metadata.topic;
        if (metadata.collected_at) {
            s.collected_at = *metadata.collected_at;
        } else {
            const auto sys = std::chrono::file_clock::to_sys(fs::last_write_time(file));
            s.collected_at = std::chrono::floor<std::chrono::seconds>(sys);
        }
        samples.push_back(std::move(s));
    }
    return SampleSet(std::move(samples), directory.string());
}

SampleAppender::SampleAppender(const fs::path& path) : path_(path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw Error(ErrorKind::input, "cannot open " + path.string() + " for append");
}

void SampleAppender::append(const TextSample& sample) {
    const auto line = to_json(sample).dump() + "\n";
    std::lock_guard lock(mutex_);
    out_ << line;
    out_.flush();
    if (!out_) throw Error(ErrorKind::input, "append failed for " + path_.string());
}

}  // namespace emdash
