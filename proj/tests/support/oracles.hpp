#pragma once
// Independent reference implementations used only by tests. Nothing here
// calls into emdash; each oracle takes a different route to the same
// answer (code-point vectors, std::regex, brute-force tables).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

inline std::u32string decode(std::string_view s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        const auto b = static_cast<unsigned char>(s[i]);
        int len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > s.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        char32_t cp = len == 1 ? b : len == 2 ? (b & 0x1F) : len == 3 ? (b & 0x0F) : (b & 0x07);
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            const auto c = static_cast<unsigned char>(s[i + k]);
            if ((c & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (c & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

struct Dashes {
    std::size_t em = 0, en = 0, double_hyphen = 0, long_hyphen_run = 0;
};

/// Single pass over code points with run-length grouping of '-'.
inline Dashes count_dashes(std::string_view text) {
    Dashes d;
    const auto cps = decode(text);
    std::size_t run = 0;
    auto close_run = [&] {
        if (run == 2) ++d.double_hyphen;
        if (run >= 3) ++d.long_hyphen_run;
        run = 0;
    };
    for (char32_t c : cps) {
        if (c == U'-') {
            ++run;
            continue;
        }
        close_run();
        if (c == 0x2014) ++d.em;
        if (c == 0x2013) ++d.en;
    }
    close_run();
    return d;
}

struct Features {
    std::size_t headings = 0, bullets = 0, numbered = 0, bold = 0, fences = 0, breaks = 0;
    std::size_t total() const { return headings + bullets + numbered + bold; }
};

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    lines.push_back(cur);
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    return lines;
}

/// Regex-per-line re-scan of the markdown subset.
inline Features detect_features(std::string_view text) {
    static const std::regex blank_re(R"(^[ \t]*$)");
    static const std::regex fence_re(R"(^ {0,3}(`{3,}|~{3,}).*$)");
    static const std::regex break_re(R"(^ {0,3}(?:(?:- *){3,}|(?:\* *){3,}|(?:_ *){3,})$)");
    static const std::regex heading_re(R"(^ {0,3}#{1,6}(?: .*)?$)");
    static const std::regex bullet_re(R"(^ {0,3}[-*+] .*$)");
    static const std::regex numbered_re(R"(^ {0,3}[0-9]{1,9}[.)] .*$)");
    static const std::regex nested_bullet_re(R"(^ {4,}[-*+] .*$)");
    static const std::regex nested_numbered_re(R"(^ {4,}[0-9]{1,9}[.)] .*$)");
    static const std::regex indented_re(R"(^ {4,}.*$)");
    static const std::regex bold_re(R"(\*\*[\s\S]+?\*\*|__[\s\S]+?__)");

    Features f;
    const auto lines = split_lines(text);
    bool in_fence = false;
    char fence_ch = 0;
    std::size_t fence_len = 0;
    bool in_list = false;
    std::string paragraph;
    bool have_paragraph = false;

    auto flush = [&] {
        if (have_paragraph) {
            f.bold += static_cast<std::size_t>(std::distance(
                std::sregex_iterator(paragraph.begin(), paragraph.end(), bold_re),
                std::sregex_iterator()));
        }
        paragraph.clear();
        have_paragraph = false;
    };

    for (const auto& line : lines) {
        std::smatch m;
        if (in_fence) {
            std::size_t i = 0;
            while (i < line.size() && i < 3 && line[i] == ' ') ++i;
            std::size_t n = 0;
            while (i + n < line.size() && line[i + n] == fence_ch) ++n;
            bool rest_blank = true;
            for (std::size_t k = i + n; k < line.size(); ++k)
                if (line[k] != ' ' && line[k] != '\t') rest_blank = false;
            if (n >= fence_len && rest_blank) {
                in_fence = false;
                ++f.fences;
            }
            continue;
        }
        if (std::regex_match(line, blank_re)) {
            flush();
            continue;
        }
        if (std::regex_match(line, m, fence_re)) {
            const std::string marker = m[1];
            // backtick fences may not carry backticks in the info string
            const auto info = line.substr(line.find(marker) + marker.size());
            if (marker[0] != '`' || info.find('`') == std::string::npos) {
                flush();
                in_fence = true;
                fence_ch = marker[0];
                fence_len = marker.size();
                in_list = false;
                continue;
            }
        }
        if (std::regex_match(line, break_re)) {
            flush();
            ++f.breaks;
            in_list = false;
            continue;
        }
        if (std::regex_match(line, heading_re)) {
            flush();
            ++f.headings;
            in_list = false;
            paragraph = line;
            have_paragraph = true;
            flush();
            continue;
        }
        if (std::regex_match(line, bullet_re) ||
            (in_list && std::regex_match(line, nested_bullet_re))) {
            ++f.bullets;
            in_list = true;
        } else if (std::regex_match(line, numbered_re) ||
                   (in_list && std::regex_match(line, nested_numbered_re))) {
            ++f.numbered;
            in_list = true;
        } else if (!std::regex_match(line, indented_re)) {
            in_list = false;
        }
        if (have_paragraph) paragraph += '\n';
        paragraph += line;
        have_paragraph = true;
    }
    flush();
    return f;
}

// ---------------------------------------------------------------------------
// Attribution brute force over the published two-condition table.

struct Row {
    const char* name;
    double em_u, em_c, md_u, md_c;
};

inline constexpr std::array<Row, 12> table1{{
    {"GPT-4.1", 10.62, 9.10, 6.27, 0.0},
    {"Claude Opus 4.6", 9.09, 0.19, 0.96, 0.0},
    {"Claude Sonnet 4", 8.29, 1.31, 6.15, 0.0},
    {"Claude Haiku 3.5", 7.51, 0.18, 5.36, 0.9},
    {"DeepSeek V3", 6.95, 5.41, 1.47, 0.0},
    {"GPT-4o Mini", 4.16, 4.23, 6.03, 0.0},
    {"GPT-4o", 4.12, 2.68, 5.38, 0.0},
    {"Gemini 2.5 Pro", 3.53, 0.00, 0.85, 0.0},
    {"GPT-5.4", 1.43, 0.29, 0.00, 0.0},
    {"Gemini 2.5 Flash", 1.28, 1.48, 1.06, 0.0},
    {"Llama 3.1 8B Inst.", 0.00, 0.00, 1.91, 0.0},
    {"Llama 3.3 70B Inst.", 0.00, 0.00, 0.00, 0.0},
}};

inline std::array<double, 4> row_vec(const Row& r) { return {r.em_u, r.em_c, r.md_u, r.md_c}; }

struct Scaling {
    std::array<double, 4> mean{}, sd{};
};

inline Scaling fit() {
    Scaling s;
    for (int f = 0; f < 4; ++f) {
        double sum = 0;
        for (const auto& r : table1) sum += row_vec(r)[f];
        s.mean[f] = sum / table1.size();
        double ss = 0;
        for (const auto& r : table1) ss += std::pow(row_vec(r)[f] - s.mean[f], 2);
        s.sd[f] = std::sqrt(ss / table1.size());
        if (s.sd[f] == 0) s.sd[f] = 1;
    }
    return s;
}

/// Full four-feature z-space distance.
inline double dist(const std::array<double, 4>& a, const std::array<double, 4>& b,
                   const Scaling& s) {
    double ss = 0;
    for (int f = 0; f < 4; ++f) ss += std::pow((a[f] - b[f]) / s.sd[f], 2);
    return std::sqrt(ss);
}

inline std::size_t nearest(const std::array<double, 4>& q, const Scaling& s) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table1.size(); ++i)
        if (dist(q, row_vec(table1[i]), s) < dist(q, row_vec(table1[best]), s)) best = i;
    return best;
}

/// Half the distance from row i to its nearest other row: any query closer
/// than this to row i keeps row i as the unique nearest neighbour.
inline double safety_radius(std::size_t i, const Scaling& s) {
    double m = INFINITY;
    for (std::size_t j = 0; j < table1.size(); ++j)
        if (j != i) m = std::min(m, dist(row_vec(table1[i]), row_vec(table1[j]), s));
    return m / 2;
}

}  // namespace oracle
