#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdash/condition.hpp"
#include "emdash/corpus.hpp"

namespace emdash {

// ---------------------------------------------------------------------------
// Provider contract

struct GenerateParams {
    int max_tokens = 2048;
    std::optional<double> temperature;  // unset = provider default
    std::uint64_t seed = 0;             // per-cell; only the mock uses it
};

enum class GenerateStatus {
    ok,
    truncated,  // output kept, flagged
    retryable,  // rate limit, timeout, 5xx
    fatal,      // auth, bad request, unknown model
};

struct GenerateResult {
    GenerateStatus status = GenerateStatus::ok;
    std::string text;
    std::string message;               // failure reason
    std::optional<int> output_tokens;  // when the provider reports it
    nlohmann::json sent_params = nlohmann::json::object();

    static GenerateResult success(std::string text) {
        GenerateResult r;
        r.text = std::move(text);
        return r;
    }
    static GenerateResult failure(GenerateStatus status, std::string message) {
        GenerateResult r;
        r.status = status;
        r.message = std::move(message);
        return r;
    }
};

/// A text-generation backend: hosted API, local runtime, or mock. The
/// harness never assumes two calls with the same prompt agree.
class ProviderClient {
public:
    virtual ~ProviderClient() = default;
    virtual GenerateResult generate(const std::string& model_name, const std::string& prompt,
                                    const GenerateParams& params) = 0;
};

/// Deterministic stand-in for a provider. Produces filler prose of the
/// prompt's word target with exactly round(words / 1000 * rate) em dashes
/// (conditions A and B) and bold spans (condition A only). The same seed,
/// per-request seed, and prompt always give the same bytes.
class MockClient final : public ProviderClient {
public:
    MockClient(double target_em_per_1k, double target_md_per_1k, std::uint64_t seed);

    GenerateResult generate(const std::string& model_name, const std::string& prompt,
                            const GenerateParams& params) override;

    std::string compose(std::string_view prompt, std::uint64_t request_seed) const;

private:
    double em_rate_;
    double md_rate_;
    std::uint64_t seed_;
};

std::unique_ptr<ProviderClient> mock_client(double target_em_per_1k, double target_md_per_1k,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Hosted providers

enum class ApiDialect { openai_chat, anthropic_messages, google_generate };

struct ProviderEndpoint {
    std::string provider;
    ApiDialect dialect = ApiDialect::openai_chat;
    std::string base_url;  // scheme://host[:port]
    std::string api_key;   // may be empty for local runtimes
    std::chrono::seconds timeout{120};
};

struct HttpRequestSpec {
    std::string path;
    std::vector<std::pair<std::string, std::string>> headers;
    nlohmann::json body;
};

HttpRequestSpec build_request(const ProviderEndpoint& endpoint, const std::string& model_name,
                              const std::string& prompt, const GenerateParams& params);

/// Maps an HTTP status and body onto the provider contract. 408, 429 and
/// 5xx are retryable; other non-2xx are fatal; a length stop is truncated.
GenerateResult parse_response(ApiDialect dialect, int http_status, std::string_view body);

std::unique_ptr<ProviderClient> http_client(ProviderEndpoint endpoint);

/// "<PROVIDER>_API_KEY" with the provider upper-cased and non-alphanumerics
/// replaced by '_'.
std::string api_key_variable(std::string_view provider);

/// Looks up an environment variable; nullopt when unset or empty.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_environment();

struct ProviderSettings;

/// Endpoint for `provider`: explicit settings over the built-in defaults
/// for openai, anthropic, google, deepseek, meta and local. Throws
/// Error(validation) for an unknown provider without a base_url or a
/// required key missing from the environment.
ProviderEndpoint resolve_endpoint(const std::string& provider, const ProviderSettings* settings,
                                  const EnvLookup& env);

// ---------------------------------------------------------------------------
// Run planning

struct ModelSpec {
    std::string provider;
    std::string model_name;                // recorded on samples and reports
    std::optional<std::string> api_model;  // identifier sent to the provider

    bool operator==(const ModelSpec&) const = default;
};

struct ProviderSettings {
    std::optional<ApiDialect> dialect;
    std::optional<std::string> base_url;
    bool requires_key = true;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{1000};
    double multiplier = 2.0;
    std::chrono::milliseconds max_delay{60000};

    /// Delay before attempt `attempt` (attempt 2 is the first retry).
    std::chrono::milliseconds delay_before(int attempt) const noexcept;
};

struct RunConfig {
    std::vector<ModelSpec> models;
    std::vector<std::string> topics;
    std::vector<Condition> conditions;
    int target_words = 1000;
    int samples_per_cell = 1;
    int max_tokens = 2048;
    int concurrency = 4;
    double requests_per_second = 1.0;  // per provider; 0 disables the bucket
    std::optional<double> temperature;
    std::filesystem::path store_path = "samples.jsonl";
    RetryPolicy retry;
    std::map<std::string, ProviderSettings> providers;
    double mock_em_per_1k = 5.0;
    double mock_md_per_1k = 5.0;
};

/// Throws Error(validation) naming the first bad field.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// The ten-topic, twelve-model, two-condition collection design.
RunConfig two_condition_config();

struct Cell {
    ModelSpec model;
    std::string topic;
    Condition condition = Condition::unconstrained;
    int replicate = 0;

    /// Stable, unique within a plan. Also used as the sample id.
    std::string key() const;
};

struct RunPlan {
    std::vector<ModelSpec> models;
    std::vector<std::string> topics;
    std::vector<Condition> conditions;
    int target_words = 1000;
    int samples_per_cell = 1;
    int max_tokens = 2048;
    std::optional<double> temperature;

    /// Ordered by model, topic, condition, replicate.
    std::vector<Cell> cells() const;
    std::size_t cell_count() const noexcept;
    /// FNV-1a over the canonical JSON form, as 16 hex digits.
    std::string hash() const;
    nlohmann::json to_json() const;
};

/// Throws Error(validation) when any list is empty or a number is out of
/// range.
RunPlan plan_run(const RunConfig& config);

// ---------------------------------------------------------------------------
// Ledger

struct RunState {
    std::string plan_hash;
    std::map<std::string, std::string> completed;  // cell key -> sample id
    std::map<std::string, std::string> failed;     // cell key -> reason

    nlohmann::json to_json() const;
    static RunState from_json(const nlohmann::json& j);
};

/// Default ledger location: "<store>.state.json".
std::filesystem::path state_path_for(const std::filesystem::path& store_path);

/// Loads the ledger or starts a fresh one for `plan`. Throws Error(state)
/// when an existing ledger belongs to a different plan.
RunState load_or_create_state(const std::filesystem::path& path, const RunPlan& plan);

/// Writes through a temporary file and rename.
void save_state(const RunState& state, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Execution

/// Token bucket shared by all workers of one provider. A rate of 0
/// disables it.
class TokenBucket {
public:
    TokenBucket(double tokens_per_second, double burst);
    void acquire();

private:
    std::mutex mutex_;
    double rate_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
};

struct ExecuteOptions {
    int concurrency = 4;  // in-flight requests per provider
    double requests_per_second = 0.0;
    RetryPolicy retry;
    std::optional<std::filesystem::path> state_path;  // persist after every change
    /// Stop handing out cells after this many attempts (simulated interrupt).
    std::optional<std::size_t> cell_limit;
    std::function<void(std::chrono::milliseconds)> sleep;  // default: this_thread
    std::function<Timestamp()> clock;                      // default: now_utc
};

struct ExecuteReport {
    SampleSet collected;
    std::size_t generate_calls = 0;
    std::size_t cells_attempted = 0;
    std::size_t cells_failed = 0;
    std::size_t truncated = 0;
};

/// Attempts every cell not yet in `state.completed`. Each provider gets
/// `concurrency` workers; a worker appends its sample and ledger entry
/// before taking its next cell. Throws Error(validation) when a provider
/// in the plan has no client. Exceptions thrown by a client propagate
/// after in-flight cells finish; the ledger keeps whatever completed.
ExecuteReport execute(const RunPlan& plan,
                      const std::map<std::string, ProviderClient*>& clients,
                      SampleAppender& store, RunState& state, const ExecuteOptions& options = {});

/// True when text stops without sentence-final punctuation.
bool ends_mid_sentence(std::string_view text) noexcept;

}  // namespace emdash
