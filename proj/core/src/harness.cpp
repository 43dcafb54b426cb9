#include "emdash/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <thread>

#include "emdash/error.hpp"
#include "emdash/suppression.hpp"

namespace emdash {

namespace fs = std::filesystem;
using nlohmann::json;

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const noexcept {
    if (attempt <= 1) return std::chrono::milliseconds{0};
    const double ms = static_cast<double>(base_delay.count()) * std::pow(multiplier, attempt - 2);
    const double capped = std::min(ms, static_cast<double>(max_delay.count()));
    return std::chrono::milliseconds{static_cast<long long>(capped)};
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::optional<ApiDialect> parse_dialect(std::string_view s) {
    if (s == "openai_chat" || s == "openai") return ApiDialect::openai_chat;
    if (s == "anthropic_messages" || s == "anthropic") return ApiDialect::anthropic_messages;
    if (s == "google_generate" || s == "google") return ApiDialect::google_generate;
    return std::nullopt;
}

template <typename T>
T number_field(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw Error(ErrorKind::validation, std::string(key) + " must be a number");
    return it->get<T>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array())
        throw Error(ErrorKind::validation, std::string("config needs a '") + key + "' array");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string() || v.get<std::string>().empty())
            throw Error(ErrorKind::validation, std::string(key) + " entries must be non-empty strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::validation, "run config must be a JSON object");
    RunConfig c;

    const auto models = j.find("models");
    if (models == j.end() || !models->is_array())
        throw Error(ErrorKind::validation, "config needs a 'models' array");
    for (const auto& m : *models) {
        if (!m.is_object() || !m.contains("provider") || !m.contains("model_name") ||
            !m["provider"].is_string() || !m["model_name"].is_string())
            throw Error(ErrorKind::validation,
                        "each model needs string 'provider' and 'model_name': " + m.dump());
        ModelSpec spec{m["provider"].get<std::string>(), m["model_name"].get<std::string>(),
                       std::nullopt};
        if (m.contains("api_model") && m["api_model"].is_string())
            spec.api_model = m["api_model"].get<std::string>();
        if (spec.provider.empty() || spec.model_name.empty())
            throw Error(ErrorKind::validation, "model provider and name must be non-empty");
        c.models.push_back(std::move(spec));
    }

    c.topics = string_list(j, "topics");
    for (const auto& s : string_list(j, "conditions")) {
        const auto cond = parse_condition(s);
        if (!cond) throw Error(ErrorKind::validation, "unknown condition '" + s + "'");
        c.conditions.push_back(*cond);
    }

    c.target_words = number_field(j, "target_words", c.target_words);
    c.samples_per_cell = number_field(j, "samples_per_cell", c.samples_per_cell);
    c.max_tokens = number_field(j, "max_tokens", c.max_tokens);
    c.concurrency = number_field(j, "concurrency", c.concurrency);
    c.requests_per_second = number_field(j, "requests_per_second", c.requests_per_second);
    if (j.contains("temperature") && !j["temperature"].is_null())
        c.temperature = number_field(j, "temperature", 0.0);
    if (const auto sp = j.find("store_path"); sp != j.end()) {
        if (!sp->is_string() || sp->get<std::string>().empty())
            throw Error(ErrorKind::validation, "store_path must be a non-empty string");
        c.store_path = sp->get<std::string>();
    }

    if (const auto r = j.find("retry"); r != j.end()) {
        c.retry.max_attempts = number_field(*r, "max_attempts", c.retry.max_attempts);
        c.retry.base_delay = std::chrono::milliseconds(
            number_field<long long>(*r, "base_delay_ms", c.retry.base_delay.count()));
        c.retry.max_delay = std::chrono::milliseconds(
            number_field<long long>(*r, "max_delay_ms", c.retry.max_delay.count()));
        c.retry.multiplier = number_field(*r, "multiplier", c.retry.multiplier);
    }

    if (const auto p = j.find("providers"); p != j.end()) {
        if (!p->is_object()) throw Error(ErrorKind::validation, "providers must be an object");
        for (const auto& [name, v] : p->items()) {
            ProviderSettings s;
            if (v.contains("api")) {
                s.dialect = parse_dialect(v["api"].get<std::string>());
                if (!s.dialect)
                    throw Error(ErrorKind::validation, "unknown api for provider '" + name + "'");
            }
            if (v.contains("base_url")) s.base_url = v["base_url"].get<std::string>();
            s.requires_key = v.value("requires_key", true);
            c.providers[name] = s;
        }
    }

    if (const auto m = j.find("mock"); m != j.end()) {
        c.mock_em_per_1k = number_field(*m, "em_per_1k", c.mock_em_per_1k);
        c.mock_md_per_1k = number_field(*m, "md_per_1k", c.mock_md_per_1k);
    }

    if (c.models.empty()) throw Error(ErrorKind::validation, "config names no models");
    if (c.topics.empty()) throw Error(ErrorKind::validation, "config names no topics");
    if (c.conditions.empty()) throw Error(ErrorKind::validation, "config names no conditions");
    if (c.concurrency < 1) throw Error(ErrorKind::validation, "concurrency must be >= 1");
    if (c.retry.max_attempts < 1) throw Error(ErrorKind::validation, "retry.max_attempts must be >= 1");
    if (c.requests_per_second < 0)
        throw Error(ErrorKind::validation, "requests_per_second must be >= 0");
    if (c.mock_em_per_1k < 0 || c.mock_md_per_1k < 0)
        throw Error(ErrorKind::validation, "mock targets must be >= 0");
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::validation, path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

RunConfig two_condition_config() {
    RunConfig c;
    c.models = {
        {"openai", "GPT-4.1", "gpt-4.1"},
        {"anthropic", "Claude Opus 4.6", "claude-opus-4-6"},
        {"anthropic", "Claude Sonnet 4", "claude-sonnet-4-20250514"},
        {"anthropic", "Claude Haiku 3.5", "claude-3-5-haiku-20241022"},
        {"deepseek", "DeepSeek V3", "deepseek-chat"},
        {"openai", "GPT-4o Mini", "gpt-4o-mini"},
        {"openai", "GPT-4o", "gpt-4o"},
        {"google", "Gemini 2.5 Pro", "gemini-2.5-pro"},
        {"openai", "GPT-5.4", "gpt-5.4"},
        {"google", "Gemini 2.5 Flash", "gemini-2.5-flash"},
        {"meta", "Llama 3.1 8B Inst.", "meta-llama/Llama-3.1-8B-Instruct"},
        {"meta", "Llama 3.3 70B Inst.", "meta-llama/Llama-3.3-70B-Instruct"},
    };
    c.topics = {"coffee",        "gardening",   "public libraries", "walking",
                "friendship",    "cooking at home", "rainy days", "learning a new language",
                "city parks",    "music"};
    c.conditions = {Condition::unconstrained, Condition::md_suppressed};
    return c;
}

// ---------------------------------------------------------------------------
// Planning

std::string Cell::key() const {
    return model.provider + "|" + model.model_name + "|" + topic + "|" + letter(condition) + "|" +
           std::to_string(replicate);
}

std::vector<Cell> RunPlan::cells() const {
    std::vector<Cell> out;
    out.reserve(cell_count());
    for (const auto& m : models)
        for (const auto& t : topics)
            for (auto c : conditions)
                for (int r = 0; r < samples_per_cell; ++r) out.push_back({m, t, c, r});
    return out;
}

std::size_t RunPlan::cell_count() const noexcept {
    return models.size() * topics.size() * conditions.size() *
           static_cast<std::size_t>(std::max(samples_per_cell, 0));
}

json RunPlan::to_json() const {
    json ms = json::array();
    for (const auto& m : models) {
        json e = {{"provider", m.provider}, {"model_name", m.model_name}};
        if (m.api_model) e["api_model"] = *m.api_model;
        ms.push_back(std::move(e));
    }
    json cs = json::array();
    for (auto c : conditions) cs.push_back(std::string(to_string(c)));
    return {{"models", ms},
            {"topics", topics},
            {"conditions", cs},
            {"target_words", target_words},
            {"samples_per_cell", samples_per_cell},
            {"max_tokens", max_tokens},
            {"temperature", temperature ? json(*temperature) : json(nullptr)}};
}

std::string RunPlan::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json().dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunPlan plan_run(const RunConfig& config) {
    if (config.models.empty()) throw Error(ErrorKind::validation, "plan needs at least one model");
    if (config.topics.empty()) throw Error(ErrorKind::validation, "plan needs at least one topic");
    if (config.conditions.empty())
        throw Error(ErrorKind::validation, "plan needs at least one condition");
    if (config.target_words <= 0) throw Error(ErrorKind::validation, "target_words must be positive");
    if (config.samples_per_cell <= 0)
        throw Error(ErrorKind::validation, "samples_per_cell must be positive");
    if (config.max_tokens <= 0) throw Error(ErrorKind::validation, "max_tokens must be positive");

    RunPlan p;
    p.models = config.models;
    p.topics = config.topics;
    p.conditions = config.conditions;
    p.target_words = config.target_words;
    p.samples_per_cell = config.samples_per_cell;
    p.max_tokens = config.max_tokens;
    p.temperature = config.temperature;

    std::vector<std::string> keys;
    for (const auto& c : p.cells()) keys.push_back(c.key());
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
        throw Error(ErrorKind::validation, "plan repeats a model, topic, or condition");
    return p;
}

// ---------------------------------------------------------------------------
// Ledger

json RunState::to_json() const {
    return {{"plan_hash", plan_hash}, {"completed", completed}, {"failed", failed}};
}

RunState RunState::from_json(const json& j) {
    RunState s;
    s.plan_hash = j.at("plan_hash").get<std::string>();
    s.completed = j.value("completed", std::map<std::string, std::string>{});
    s.failed = j.value("failed", std::map<std::string, std::string>{});
    return s;
}

fs::path state_path_for(const fs::path& store_path) {
    return fs::path(store_path.string() + ".state.json");
}

RunState load_or_create_state(const fs::path& path, const RunPlan& plan) {
    if (!fs::exists(path)) {
        RunState s;
        s.plan_hash = plan.hash();
        return s;
    }
    RunState s;
    try {
        s = RunState::from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::state, path.string() + ": " + e.what());
    }
    if (s.plan_hash != plan.hash())
        throw Error(ErrorKind::state, path.string() + " belongs to a different plan (" +
                                          s.plan_hash + " != " + plan.hash() + ")");
    return s;
}

void save_state(const RunState& state, const fs::path& path) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::input, "cannot write " + tmp.string());
        out << state.to_json().dump(2) << '\n';
        if (!out) throw Error(ErrorKind::input, "write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Execution

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second),
      capacity_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
        const auto now = std::chrono::steady_clock::now();
        const std::chrono::duration<double> elapsed = now - last_;
        tokens_ = std::min(capacity_, tokens_ + elapsed.count() * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        lock.unlock();
        std::this_thread::sleep_for(wait);
        lock.lock();
    }
}

bool ends_mid_sentence(std::string_view text) noexcept {
    const auto end = text.find_last_not_of(" \t\r\n");
    if (end == std::string_view::npos) return false;
    const std::string_view closers[] = {".", "!", "?", "\"", "'", ")", "]", "\xE2\x80\x9D",
                                        "\xE2\x80\x99"};
    const auto trimmed = text.substr(0, end + 1);
    for (auto c : closers)
        if (trimmed.size() >= c.size() && trimmed.substr(trimmed.size() - c.size()) == c)
            return false;
    return true;
}

namespace {

struct Shared {
    Shared(const RunPlan& p, SampleAppender& s, RunState& st, const ExecuteOptions& o)
        : plan(p), store(s), state(st), options(o) {}

    const RunPlan& plan;
    SampleAppender& store;
    RunState& state;
    const ExecuteOptions& options;

    std::mutex writer;  // store, state, collected
    std::vector<std::pair<std::size_t, TextSample>> collected;
    std::atomic<std::size_t> generate_calls{0};
    std::atomic<std::size_t> attempted{0};
    std::atomic<std::size_t> failed{0};
    std::atomic<std::size_t> truncated{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;

    void persist() {
        if (options.state_path) save_state(state, *options.state_path);
    }
};

struct ProviderQueue {
    ProviderClient* client = nullptr;
    std::mutex mutex;
    std::deque<std::pair<std::size_t, Cell>> cells;
    std::unique_ptr<TokenBucket> bucket;
};

void run_cell(Shared& sh, ProviderQueue& q, std::size_t index, const Cell& cell) {
    const auto& opt = sh.options;
    const std::string prompt = build_prompt(cell.topic, cell.condition, sh.plan.target_words);
    GenerateParams params;
    params.max_tokens = sh.plan.max_tokens;
    params.temperature = sh.plan.temperature;
    params.seed = static_cast<std::uint64_t>(index);

    GenerateResult result;
    std::string reason;
    for (int attempt = 1; attempt <= opt.retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            const auto delay = opt.retry.delay_before(attempt);
            if (opt.sleep)
                opt.sleep(delay);
            else
                std::this_thread::sleep_for(delay);
        }
        q.bucket->acquire();
        ++sh.generate_calls;
        result = q.client->generate(cell.model.api_model.value_or(cell.model.model_name), prompt,
                                    params);
        if (result.status != GenerateStatus::retryable) break;
        reason = "retryable failure after " + std::to_string(attempt) + " attempt(s): " +
                 result.message;
    }

    const std::string key = cell.key();
    if (result.status == GenerateStatus::retryable || result.status == GenerateStatus::fatal) {
        if (result.status == GenerateStatus::fatal) reason = "fatal: " + result.message;
        ++sh.failed;
        std::lock_guard lock(sh.writer);
        sh.state.failed[key] = reason;
        sh.persist();
        return;
    }

    const bool truncated =
        result.status == GenerateStatus::truncated ||
        (result.output_tokens && *result.output_tokens >= sh.plan.max_tokens &&
         ends_mid_sentence(result.text));

    TextSample s;
    s.id = key;
    s.text = std::move(result.text);
    s.source = Source::model;
    s.provider = cell.model.provider;
    s.model_name = cell.model.model_name;
    s.condition = cell.condition;
    s.topic = cell.topic;
    s.target_words = sh.plan.target_words;
    s.collected_at = opt.clock ? opt.clock() : now_utc();
    json gp = result.sent_params.is_object() ? result.sent_params : json::object();
    gp["max_tokens"] = sh.plan.max_tokens;
    if (sh.plan.temperature) gp["temperature"] = *sh.plan.temperature;
    if (truncated) {
        gp["truncated"] = true;
        ++sh.truncated;
    }
    s.generation_params = std::move(gp);

    std::lock_guard lock(sh.writer);
    sh.store.append(s);
    sh.state.completed[key] = s.id;
    sh.state.failed.erase(key);
    sh.persist();
    sh.collected.emplace_back(index, std::move(s));
}

void worker(Shared& sh, ProviderQueue& q) {
    for (;;) {
        if (sh.stop) return;
        std::pair<std::size_t, Cell> next;
        {
            std::lock_guard lock(q.mutex);
            if (q.cells.empty()) return;
            auto seen = sh.attempted.load();
            do {
                if (sh.options.cell_limit && seen >= *sh.options.cell_limit) return;
            } while (!sh.attempted.compare_exchange_weak(seen, seen + 1));
            next = std::move(q.cells.front());
            q.cells.pop_front();
        }
        try {
            run_cell(sh, q, next.first, next.second);
        } catch (...) {
            std::lock_guard lock(sh.writer);
            if (!sh.error) sh.error = std::current_exception();
            sh.stop = true;
            return;
        }
    }
}

}  // namespace

ExecuteReport execute(const RunPlan& plan, const std::map<std::string, ProviderClient*>& clients,
                      SampleAppender& store, RunState& state, const ExecuteOptions& options) {
    if (state.plan_hash.empty()) state.plan_hash = plan.hash();
    if (state.plan_hash != plan.hash())
        throw Error(ErrorKind::state, "run state belongs to a different plan");
    if (options.concurrency < 1) throw Error(ErrorKind::validation, "concurrency must be >= 1");

    std::map<std::string, ProviderQueue> queues;
    for (const auto& m : plan.models) {
        const auto it = clients.find(m.provider);
        if (it == clients.end() || it->second == nullptr)
            throw Error(ErrorKind::validation, "no client for provider '" + m.provider + "'");
        auto& q = queues[m.provider];
        q.client = it->second;
        if (!q.bucket)
            q.bucket = std::make_unique<TokenBucket>(options.requests_per_second,
                                                     static_cast<double>(options.concurrency));
    }

    const auto cells = plan.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (state.completed.contains(cells[i].key())) continue;
        queues[cells[i].model.provider].cells.emplace_back(i, cells[i]);
    }

    Shared sh{plan, store, state, options};
    {
        std::vector<std::jthread> threads;
        for (auto& [_, q] : queues) {
            const auto n = std::min<std::size_t>(static_cast<std::size_t>(options.concurrency),
                                                 q.cells.size());
            for (std::size_t k = 0; k < n; ++k)
                threads.emplace_back([&sh, &q] { worker(sh, q); });
        }
    }
    if (sh.error) std::rethrow_exception(sh.error);

    std::sort(sh.collected.begin(), sh.collected.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<TextSample> samples;
    for (auto& [_, s] : sh.collected) samples.push_back(std::move(s));

    ExecuteReport report;
    report.collected = SampleSet(std::move(samples), store.path().string());
    report.generate_calls = sh.generate_calls;
    report.cells_attempted = sh.attempted;
    report.cells_failed = sh.failed;
    report.truncated = sh.truncated;
    return report;
}

}  // namespace emdash
