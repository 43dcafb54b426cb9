#include <array>
#include <cmath>
#include <random>
#include <set>

#include "emdash/harness.hpp"
#include "emdash/suppression.hpp"

namespace emdash {

namespace {

constexpr std::array<std::string_view, 48> vocabulary{
    "the",     "quiet",    "morning", "brings",   "a",        "sense",   "of",       "order",
    "people",  "often",    "notice",  "small",    "details",  "that",    "shape",    "their",
    "days",    "and",      "habits",  "change",   "slowly",   "over",    "many",     "years",
    "while",   "others",   "remain",  "steady",   "through",  "every",   "season",   "each",
    "choice",  "carries",  "weight",  "for",      "those",    "who",     "pay",      "attention",
    "simple",  "routines", "offer",   "comfort",  "when",     "plans",   "shift",    "again",
};

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// k distinct positions out of [0, n), ascending.
std::set<std::size_t> pick(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::set<std::size_t> out;
    if (n == 0) return out;
    k = std::min(k, n);
    while (out.size() < k) out.insert(static_cast<std::size_t>(rng() % n));
    return out;
}

}  // namespace

MockClient::MockClient(double target_em_per_1k, double target_md_per_1k, std::uint64_t seed)
    : em_rate_(target_em_per_1k), md_rate_(target_md_per_1k), seed_(seed) {}

std::string MockClient::compose(std::string_view prompt, std::uint64_t request_seed) const {
    const int words = std::max(1, prompt_target_words(prompt).value_or(1000));
    const Condition cond = prompt_condition(prompt);
    const auto n = static_cast<std::size_t>(words);

    const auto n_em = cond == Condition::em_suppressed
                          ? std::size_t{0}
                          : static_cast<std::size_t>(std::llround(words / 1000.0 * em_rate_));
    const auto n_md = cond == Condition::unconstrained
                          ? static_cast<std::size_t>(std::llround(words / 1000.0 * md_rate_))
                          : std::size_t{0};

    std::mt19937_64 rng(seed_ ^ (request_seed * 0x9E3779B97F4A7C15ULL) ^ fnv1a(prompt));

    // Em dashes sit in the gap after word i; bold wraps word i.
    const auto em_after = pick(rng, n > 1 ? n - 1 : 0, n_em);
    const auto bold = pick(rng, n, n_md);

    std::string out;
    std::size_t sentence_len = 0;
    std::size_t sentence_target = 8 + rng() % 10;
    std::size_t sentences_in_paragraph = 0;
    bool capitalize = true;
    for (std::size_t i = 0; i < n; ++i) {
        std::string word(vocabulary[rng() % vocabulary.size()]);
        if (capitalize) {
            word[0] = static_cast<char>(word[0] - 'a' + 'A');
            capitalize = false;
        }
        if (bold.count(i)) word = "**" + word + "**";
        out += word;
        ++sentence_len;

        const bool last = i + 1 == n;
        if (last || (sentence_len >= sentence_target && !em_after.count(i))) {
            out += '.';
            sentence_len = 0;
            sentence_target = 8 + rng() % 10;
            capitalize = true;
            if (last) break;
            if (++sentences_in_paragraph >= 5) {
                out += "\n\n";
                sentences_in_paragraph = 0;
            } else {
                out += ' ';
            }
            continue;
        }
        out += em_after.count(i) ? " — " : " ";
    }
    out += '\n';
    return out;
}

GenerateResult MockClient::generate(const std::string& model_name, const std::string& prompt,
                                    const GenerateParams& params) {
    auto r = GenerateResult::success(compose(prompt, params.seed));
    r.sent_params = {{"model", model_name}, {"seed", params.seed}, {"mock", true}};
    return r;
}

std::unique_ptr<ProviderClient> mock_client(double target_em_per_1k, double target_md_per_1k,
                                            std::uint64_t seed) {
    return std::make_unique<MockClient>(target_em_per_1k, target_md_per_1k, seed);
}

}  // namespace emdash
