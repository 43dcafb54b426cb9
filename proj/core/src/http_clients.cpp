#include <cctype>
#include <cstdlib>

#include <httplib.h>

#include "emdash/error.hpp"
#include "emdash/harness.hpp"

namespace emdash {

using nlohmann::json;

HttpRequestSpec build_request(const ProviderEndpoint& endpoint, const std::string& model_name,
                              const std::string& prompt, const GenerateParams& params) {
    HttpRequestSpec r;
    r.headers.emplace_back("content-type", "application/json");
    switch (endpoint.dialect) {
        case ApiDialect::openai_chat:
            r.path = "/v1/chat/completions";
            if (!endpoint.api_key.empty())
                r.headers.emplace_back("authorization", "Bearer " + endpoint.api_key);
            r.body = {{"model", model_name},
                      {"max_tokens", params.max_tokens},
                      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
            break;
        case ApiDialect::anthropic_messages:
            r.path = "/v1/messages";
            r.headers.emplace_back("x-api-key", endpoint.api_key);
            r.headers.emplace_back("anthropic-version", "2023-06-01");
            r.body = {{"model", model_name},
                      {"max_tokens", params.max_tokens},
                      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
            break;
        case ApiDialect::google_generate:
            r.path = "/v1beta/models/" + model_name + ":generateContent";
            if (!endpoint.api_key.empty()) r.headers.emplace_back("x-goog-api-key", endpoint.api_key);
            r.body = {{"contents", json::array({{{"role", "user"},
                                                 {"parts", json::array({{{"text", prompt}}})}}})},
                      {"generationConfig", {{"maxOutputTokens", params.max_tokens}}}};
            break;
    }
    if (params.temperature) {
        if (endpoint.dialect == ApiDialect::google_generate)
            r.body["generationConfig"]["temperature"] = *params.temperature;
        else
            r.body["temperature"] = *params.temperature;
    }
    return r;
}

namespace {

std::string error_message(int status, const json& body, std::string_view raw) {
    std::string msg = "HTTP " + std::to_string(status);
    if (body.is_object() && body.contains("error")) {
        const auto& e = body["error"];
        if (e.is_object() && e.contains("message") && e["message"].is_string())
            return msg + ": " + e["message"].get<std::string>();
        if (e.is_string()) return msg + ": " + e.get<std::string>();
    }
    if (!raw.empty()) msg += ": " + std::string(raw.substr(0, 200));
    return msg;
}

}  // namespace

GenerateResult parse_response(ApiDialect dialect, int http_status, std::string_view body) {
    const json j = json::parse(body, nullptr, false);
    if (http_status == 408 || http_status == 429 || http_status >= 500)
        return GenerateResult::failure(GenerateStatus::retryable,
                                       error_message(http_status, j, body));
    if (http_status < 200 || http_status >= 300)
        return GenerateResult::failure(GenerateStatus::fatal, error_message(http_status, j, body));
    if (j.is_discarded() || !j.is_object())
        return GenerateResult::failure(GenerateStatus::retryable, "response is not a JSON object");

    GenerateResult r;
    bool length_stop = false;
    try {
        switch (dialect) {
            case ApiDialect::openai_chat: {
                const auto& choice = j.at("choices").at(0);
                const auto& content = choice.at("message").at("content");
                r.text = content.is_string() ? content.get<std::string>() : std::string{};
                length_stop = choice.value("finish_reason", "") == "length";
                if (j.contains("usage") && j["usage"].contains("completion_tokens"))
                    r.output_tokens = j["usage"]["completion_tokens"].get<int>();
                break;
            }
            case ApiDialect::anthropic_messages: {
                for (const auto& block : j.at("content"))
                    if (block.value("type", "") == "text") r.text += block.at("text").get<std::string>();
                length_stop = j.value("stop_reason", "") == "max_tokens";
                if (j.contains("usage") && j["usage"].contains("output_tokens"))
                    r.output_tokens = j["usage"]["output_tokens"].get<int>();
                break;
            }
            case ApiDialect::google_generate: {
                const auto& cand = j.at("candidates").at(0);
                if (cand.contains("content") && cand["content"].contains("parts"))
                    for (const auto& part : cand["content"]["parts"])
                        if (part.contains("text")) r.text += part["text"].get<std::string>();
                length_stop = cand.value("finishReason", "") == "MAX_TOKENS";
                if (j.contains("usageMetadata") && j["usageMetadata"].contains("candidatesTokenCount"))
                    r.output_tokens = j["usageMetadata"]["candidatesTokenCount"].get<int>();
                break;
            }
        }
    } catch (const json::exception& e) {
        return GenerateResult::failure(GenerateStatus::fatal,
                                       std::string("unexpected response shape: ") + e.what());
    }
    if (length_stop) r.status = GenerateStatus::truncated;
    return r;
}

namespace {

class HttpClient final : public ProviderClient {
public:
    explicit HttpClient(ProviderEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

    GenerateResult generate(const std::string& model_name, const std::string& prompt,
                            const GenerateParams& params) override {
        const auto spec = build_request(endpoint_, model_name, prompt, params);
        httplib::Client client(endpoint_.base_url);
        client.set_connection_timeout(endpoint_.timeout);
        client.set_read_timeout(endpoint_.timeout);
        client.set_write_timeout(endpoint_.timeout);
        httplib::Headers headers;
        for (const auto& [k, v] : spec.headers)
            if (k != "content-type") headers.emplace(k, v);

        const auto res = client.Post(spec.path, headers, spec.body.dump(), "application/json");
        if (!res)
            return GenerateResult::failure(GenerateStatus::retryable,
                                           "transport error: " + httplib::to_string(res.error()));
        auto r = parse_response(endpoint_.dialect, res->status, res->body);
        r.sent_params = {{"model", model_name}};
        return r;
    }

private:
    ProviderEndpoint endpoint_;
};

}  // namespace

std::unique_ptr<ProviderClient> http_client(ProviderEndpoint endpoint) {
    return std::make_unique<HttpClient>(std::move(endpoint));
}

std::string api_key_variable(std::string_view provider) {
    std::string out;
    for (unsigned char c : provider)
        out += std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_';
    return out + "_API_KEY";
}

EnvLookup process_environment() {
    return [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
}

ProviderEndpoint resolve_endpoint(const std::string& provider, const ProviderSettings* settings,
                                  const EnvLookup& env) {
    struct Known {
        std::string_view name;
        ApiDialect dialect;
        std::string_view base_url;
        bool requires_key;
    };
    static constexpr Known known[] = {
        {"openai", ApiDialect::openai_chat, "https://api.openai.com", true},
        {"anthropic", ApiDialect::anthropic_messages, "https://api.anthropic.com", true},
        {"google", ApiDialect::google_generate, "https://generativelanguage.googleapis.com", true},
        {"deepseek", ApiDialect::openai_chat, "https://api.deepseek.com", true},
        {"meta", ApiDialect::openai_chat, "https://api.together.xyz", true},
        {"local", ApiDialect::openai_chat, "http://localhost:8000", false},
    };

    ProviderEndpoint e;
    e.provider = provider;
    bool requires_key = true;
    bool have_url = false;
    for (const auto& k : known) {
        if (k.name != provider) continue;
        e.dialect = k.dialect;
        e.base_url = k.base_url;
        requires_key = k.requires_key;
        have_url = true;
    }
    if (settings) {
        if (settings->dialect) e.dialect = *settings->dialect;
        if (settings->base_url) {
            e.base_url = *settings->base_url;
            have_url = true;
        }
        requires_key = settings->requires_key;
    }
    if (!have_url)
        throw Error(ErrorKind::validation,
                    "provider '" + provider + "' is not built in; give it a base_url");

    const auto var = api_key_variable(provider);
    if (const auto key = env ? env(var) : std::nullopt) e.api_key = *key;
    if (requires_key && e.api_key.empty())
        throw Error(ErrorKind::validation,
                    "missing credentials for provider '" + provider + "': set " + var);
    return e;
}

}  // namespace emdash
