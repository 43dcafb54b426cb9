#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "emdash/corpus.hpp"
#include "emdash/mdfeatures.hpp"

namespace emdash {

struct DashCounts {
    std::size_t em = 0;               // U+2014
    std::size_t en = 0;               // U+2013
    std::size_t double_hyphen = 0;    // maximal "-" run of length exactly 2
    std::size_t long_hyphen_run = 0;  // maximal "-" run of length >= 3

    std::size_t total() const noexcept { return em + en + double_hyphen + long_hyphen_run; }

    DashCounts& operator+=(const DashCounts& o) noexcept {
        em += o.em;
        en += o.en;
        double_hyphen += o.double_hyphen;
        long_hyphen_run += o.long_hyphen_run;
        return *this;
    }
    friend DashCounts operator+(DashCounts a, const DashCounts& b) noexcept { return a += b; }
    bool operator==(const DashCounts&) const = default;
};

/// Whitespace-delimited tokens that contain at least one alphanumeric
/// code point. A bare "—" is not a word; "a—b" is one word.
std::size_t count_words(std::string_view text) noexcept;

DashCounts count_dashes(std::string_view text) noexcept;

/// 1000 * count / words at full precision. Throws Error(undefined_rate)
/// when words == 0.
double per_1k(std::size_t count, std::size_t words);

/// Two decimals, half-up. Intended for report boundaries only.
std::string format_rate(double rate);

struct MetricsRecord {
    std::string sample_id;
    std::size_t words = 0;
    DashCounts dash;
    FeatureCounts md_features;
    double em_per_1k = 0.0;
    double md_per_1k = 0.0;

    bool operator==(const MetricsRecord&) const = default;
};

MetricsRecord analyze_text(std::string_view sample_id, std::string_view text);

/// Throws Error(undefined_rate) naming the sample when it has no words.
MetricsRecord analyze_sample(const TextSample& sample);

nlohmann::json to_json(const DashCounts& d);
nlohmann::json to_json(const MetricsRecord& m);

}  // namespace emdash
