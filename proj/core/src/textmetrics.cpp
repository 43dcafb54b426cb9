#include "emdash/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "emdash/error.hpp"
#include "emdash/utf8.hpp"

namespace emdash {

std::size_t count_words(std::string_view text) noexcept {
    std::size_t words = 0;
    bool in_token = false;
    bool has_alnum = false;
    for (std::size_t i = 0; i < text.size();) {
        const auto d = utf8::decode(text, i);
        i += d.length;
        if (utf8::is_space(d.cp)) {
            if (in_token && has_alnum) ++words;
            in_token = has_alnum = false;
            continue;
        }
        in_token = true;
        has_alnum = has_alnum || utf8::is_alnum(d.cp);
    }
    if (in_token && has_alnum) ++words;
    return words;
}

DashCounts count_dashes(std::string_view text) noexcept {
    DashCounts d;
    std::size_t run = 0;
    auto close_run = [&] {
        if (run == 2)
            ++d.double_hyphen;
        else if (run >= 3)
            ++d.long_hyphen_run;
        run = 0;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '-') {
            ++run;
            continue;
        }
        close_run();
        // U+2014 = E2 80 94, U+2013 = E2 80 93
        if (c == '\xE2' && i + 2 < text.size() && text[i + 1] == '\x80') {
            if (text[i + 2] == '\x94') {
                ++d.em;
                i += 2;
            } else if (text[i + 2] == '\x93') {
                ++d.en;
                i += 2;
            }
        }
    }
    close_run();
    return d;
}

double per_1k(std::size_t count, std::size_t words) {
    if (words == 0) throw Error(ErrorKind::undefined_rate, "rate over zero words");
    return 1000.0 * static_cast<double>(count) / static_cast<double>(words);
}

std::string format_rate(double rate) {
    // Half-up at the second decimal. The small slack absorbs binary
    // representation error in values such as 9.105 that should round up.
    const double scaled = rate * 100.0;
    const double slack = 1e-9 * std::max(1.0, std::fabs(scaled));
    const auto cents = static_cast<long long>(std::floor(scaled + 0.5 + slack));
    const long long whole = std::llabs(cents) / 100;
    const long long frac = std::llabs(cents) % 100;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents < 0 ? "-" : "", whole, frac);
    return buf;
}

MetricsRecord analyze_text(std::string_view sample_id, std::string_view text) {
    MetricsRecord m;
    m.sample_id = std::string(sample_id);
    m.words = count_words(text);
    if (m.words == 0)
        throw Error(ErrorKind::undefined_rate,
                    "sample '" + m.sample_id + "' has no words; rates are undefined");
    m.dash = count_dashes(text);
    m.md_features = detect_features(text);
    m.em_per_1k = per_1k(m.dash.em, m.words);
    m.md_per_1k = md_per_1k(m.md_features, m.words);
    return m;
}

MetricsRecord analyze_sample(const TextSample& sample) {
    return analyze_text(sample.id, sample.text);
}

nlohmann::json to_json(const DashCounts& d) {
    return {{"em", d.em},
            {"en", d.en},
            {"double_hyphen", d.double_hyphen},
            {"long_hyphen_run", d.long_hyphen_run}};
}

nlohmann::json to_json(const MetricsRecord& m) {
    const auto& f = m.md_features;
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : f.positions)
        positions.push_back({{"kind", std::string(to_string(p.kind))}, {"line", p.line}});
    return {{"sample_id", m.sample_id},
            {"words", m.words},
            {"dash", to_json(m.dash)},
            {"md_features",
             {{"headings", f.headings},
              {"bullet_items", f.bullet_items},
              {"numbered_items", f.numbered_items},
              {"bold_spans", f.bold_spans},
              {"fenced_code_blocks", f.fenced_code_blocks},
              {"thematic_breaks", f.thematic_breaks},
              {"taxonomy_total", f.taxonomy_total()},
              {"positions", positions}}},
            {"em_per_1k", m.em_per_1k},
            {"md_per_1k", m.md_per_1k}};
}

}  // namespace emdash
