#pragma once
// Fixture builders shared by unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "emdash/condition.hpp"
#include "emdash/corpus.hpp"

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        const auto tag = std::to_string(rd()) + std::to_string(rd());
        path_ = fs::temp_directory_path() / ("emdash-test-" + tag);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& p, std::string_view content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// `words` plain ASCII words in one paragraph, with `em` spaced em dashes
/// and `bold` bold-wrapped words spread evenly. Dashes and bold markers
/// never change the word count.
inline std::string essay(std::size_t words, std::size_t em = 0, std::size_t bold = 0,
                         std::uint64_t seed = 1) {
    static constexpr std::string_view vocab[] = {"river", "stone", "light", "paper", "window",
                                                 "garden", "quiet", "morning", "road", "letter"};
    std::mt19937_64 rng(seed);
    std::string out;
    std::size_t em_left = em;
    std::size_t bold_left = bold;
    for (std::size_t i = 0; i < words; ++i) {
        std::string w(vocab[rng() % std::size(vocab)]);
        // Spread markers: place one whenever the remaining quota is ahead
        // of the remaining words.
        if (bold_left && bold_left * words >= (words - i) * bold) {
            w = "**" + w + "**";
            --bold_left;
        }
        out += w;
        if (i + 1 == words) break;
        if (em_left && i + 1 < words && em_left * (words - 1) >= (words - 1 - i) * em) {
            out += " — ";
            --em_left;
        } else {
            out += (i % 12 == 11) ? ". " : " ";
        }
    }
    out += ".\n";
    return out;
}

inline emdash::TextSample model_sample(std::string id, std::string provider, std::string model,
                                       emdash::Condition cond, std::string text,
                                       std::string topic = "tea") {
    emdash::TextSample s;
    s.id = std::move(id);
    s.text = std::move(text);
    s.source = emdash::Source::model;
    s.provider = std::move(provider);
    s.model_name = std::move(model);
    s.condition = cond;
    s.topic = std::move(topic);
    s.target_words = 1000;
    s.collected_at = emdash::parse_timestamp("2026-01-02T03:04:05Z");
    s.generation_params = nlohmann::json::object();
    return s;
}

inline emdash::TextSample human_sample(std::string id, std::string text) {
    emdash::TextSample s;
    s.id = std::move(id);
    s.text = std::move(text);
    s.source = emdash::Source::human;
    s.collected_at = emdash::parse_timestamp("2026-01-02T03:04:05Z");
    return s;
}

/// Word, em dash and bold totals for one report cell whose pooled rates
/// land strictly inside the two-decimal rounding interval of the targets.
struct CellCounts {
    std::size_t words = 0;
    std::size_t em = 0;
    std::size_t md = 0;
};

inline CellCounts counts_for(double em_rate, double md_rate, std::size_t min_words = 10000) {
    auto fits = [](double target, std::size_t count, std::size_t words) {
        const double r = 1000.0 * static_cast<double>(count) / static_cast<double>(words);
        return r > target - 0.004 && r < target + 0.004;
    };
    for (std::size_t w = min_words; w < min_words + 100000; ++w) {
        const auto em = static_cast<std::size_t>(std::llround(em_rate * w / 1000.0));
        const auto md = static_cast<std::size_t>(std::llround(md_rate * w / 1000.0));
        if (fits(em_rate, em, w) && fits(md_rate, md, w)) return {w, em, md};
    }
    return {};
}

/// Splits a cell's totals across `n` essays.
inline std::vector<emdash::TextSample> cell_samples(const std::string& provider,
                                                    const std::string& model,
                                                    emdash::Condition cond, CellCounts c,
                                                    std::size_t n = 10) {
    std::vector<emdash::TextSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto share = [&](std::size_t total) { return total / n + (i < total % n ? 1 : 0); };
        const auto id = model + "|" + std::string(1, emdash::letter(cond)) + "|" + std::to_string(i);
        out.push_back(model_sample(id, provider, model, cond,
                                   essay(share(c.words), share(c.em), share(c.md), i + 1),
                                   "topic " + std::to_string(i)));
    }
    return out;
}

}  // namespace fixtures
