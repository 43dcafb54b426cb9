#include "emdash/mdfeatures.hpp"

#include <algorithm>
#include <string>

#include "emdash/error.hpp"
#include "emdash/textmetrics.hpp"

namespace emdash {

std::string_view to_string(FeatureKind k) noexcept {
    switch (k) {
        case FeatureKind::heading: return "heading";
        case FeatureKind::bullet_item: return "bullet_item";
        case FeatureKind::numbered_item: return "numbered_item";
        case FeatureKind::bold_span: return "bold_span";
        case FeatureKind::fenced_code_block: return "fenced_code_block";
        case FeatureKind::thematic_break: return "thematic_break";
    }
    return "unknown";
}

namespace {

std::string_view strip_cr(std::string_view line) noexcept {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::size_t leading_spaces(std::string_view line) noexcept {
    std::size_t n = 0;
    while (n < line.size() && line[n] == ' ') ++n;
    return n;
}

bool is_blank(std::string_view line) noexcept {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// List marker starting exactly at `at`.
bool bullet_at(std::string_view line, std::size_t at) noexcept {
    return at + 1 < line.size() && (line[at] == '-' || line[at] == '*' || line[at] == '+') &&
           line[at + 1] == ' ';
}

bool numbered_at(std::string_view line, std::size_t at) noexcept {
    std::size_t i = at;
    while (i < line.size() && is_digit(line[i])) ++i;
    const std::size_t digits = i - at;
    return digits >= 1 && digits <= 9 && i + 1 < line.size() &&
           (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ';
}

// Counts bold spans in one paragraph and reports the line of each opener.
// A span is the leftmost "**" (or "__") that has a matching delimiter at
// least one character later, closed by the nearest such delimiter.
void scan_bold(std::string_view block, std::size_t first_line, FeatureCounts& out) {
    bool exhausted[2] = {false, false};  // no further closer for ** / __
    const std::string_view delims[2] = {"**", "__"};
    std::size_t line = first_line;
    std::size_t line_pos = 0;  // block index up to which `line` is valid
    auto line_of = [&](std::size_t pos) {
        line += static_cast<std::size_t>(
            std::count(block.begin() + static_cast<std::ptrdiff_t>(line_pos),
                       block.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
        line_pos = pos;
        return line;
    };

    std::size_t pos = 0;
    while (pos + 1 < block.size()) {
        std::size_t best = std::string_view::npos;
        int type = -1;
        for (int t = 0; t < 2; ++t) {
            if (exhausted[t]) continue;
            const auto p = block.find(delims[t], pos);
            if (p < best) {
                best = p;
                type = t;
            }
        }
        if (type < 0) break;
        const auto closer = block.find(delims[type], best + 3);
        if (closer == std::string_view::npos) {
            // Nothing later can close this kind either.
            exhausted[type] = true;
            continue;
        }
        ++out.bold_spans;
        out.positions.push_back({FeatureKind::bold_span, line_of(best)});
        pos = closer + 2;
    }
}

}  // namespace

std::optional<FenceMarker> fence_open(std::string_view line) noexcept {
    line = strip_cr(line);
    const std::size_t indent = leading_spaces(line);
    if (indent > 3 || indent >= line.size()) return std::nullopt;
    const char ch = line[indent];
    if (ch != '`' && ch != '~') return std::nullopt;
    std::size_t n = 0;
    while (indent + n < line.size() && line[indent + n] == ch) ++n;
    if (n < 3) return std::nullopt;
    if (ch == '`' && line.substr(indent + n).find('`') != std::string_view::npos)
        return std::nullopt;
    return FenceMarker{ch, n};
}

bool fence_closes(std::string_view line, const FenceMarker& open) noexcept {
    line = strip_cr(line);
    const std::size_t indent = std::min<std::size_t>(leading_spaces(line), 3);
    std::size_t n = 0;
    while (indent + n < line.size() && line[indent + n] == open.ch) ++n;
    return n >= open.length && is_blank(line.substr(indent + n));
}

bool is_thematic_break(std::string_view line) noexcept {
    line = strip_cr(line);
    const std::size_t indent = leading_spaces(line);
    if (indent > 3 || indent >= line.size()) return false;
    const char ch = line[indent];
    if (ch != '-' && ch != '*' && ch != '_') return false;
    std::size_t marks = 0;
    for (std::size_t i = indent; i < line.size(); ++i) {
        if (line[i] == ch)
            ++marks;
        else if (line[i] != ' ')
            return false;
    }
    return marks >= 3;
}

bool is_atx_heading(std::string_view line) noexcept {
    line = strip_cr(line);
    const std::size_t indent = leading_spaces(line);
    if (indent > 3) return false;
    std::size_t n = 0;
    while (indent + n < line.size() && line[indent + n] == '#') ++n;
    if (n < 1 || n > 6) return false;
    return indent + n == line.size() || line[indent + n] == ' ';
}

bool is_bullet_item(std::string_view line) noexcept {
    line = strip_cr(line);
    const std::size_t indent = leading_spaces(line);
    return indent <= 3 && !is_thematic_break(line) && bullet_at(line, indent);
}

bool is_numbered_item(std::string_view line) noexcept {
    line = strip_cr(line);
    const std::size_t indent = leading_spaces(line);
    return indent <= 3 && numbered_at(line, indent);
}

LineKind classify_line(std::string_view line) noexcept {
    line = strip_cr(line);
    if (is_blank(line)) return LineKind::blank;
    if (fence_open(line)) return LineKind::fence;
    if (is_thematic_break(line)) return LineKind::thematic_break;
    if (is_atx_heading(line)) return LineKind::atx_heading;
    if (is_bullet_item(line)) return LineKind::bullet_item;
    if (is_numbered_item(line)) return LineKind::numbered_item;
    return LineKind::text;
}

FeatureCounts detect_features(std::string_view text) {
    FeatureCounts out;

    std::optional<FenceMarker> fence;
    std::size_t fence_line = 0;
    bool in_list = false;

    std::string paragraph;
    std::size_t paragraph_line = 0;
    bool have_paragraph = false;
    auto flush = [&] {
        if (have_paragraph) scan_bold(paragraph, paragraph_line, out);
        paragraph.clear();
        have_paragraph = false;
    };
    auto add_to_paragraph = [&](std::string_view line, std::size_t line_no) {
        if (have_paragraph) {
            paragraph += '\n';
        } else {
            paragraph_line = line_no;
            have_paragraph = true;
        }
        paragraph.append(line);
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = strip_cr(text.substr(start, end - start));
        start = end + 1;
        ++line_no;

        if (fence) {
            if (fence_closes(line, *fence)) {
                ++out.fenced_code_blocks;
                out.positions.push_back({FeatureKind::fenced_code_block, fence_line});
                fence.reset();
            }
            continue;
        }
        if (is_blank(line)) {
            flush();
            continue;
        }
        if (auto f = fence_open(line)) {
            flush();
            fence = f;
            fence_line = line_no;
            in_list = false;
            continue;
        }
        if (is_thematic_break(line)) {
            flush();
            ++out.thematic_breaks;
            out.positions.push_back({FeatureKind::thematic_break, line_no});
            in_list = false;
            continue;
        }
        if (is_atx_heading(line)) {
            flush();
            ++out.headings;
            out.positions.push_back({FeatureKind::heading, line_no});
            in_list = false;
            add_to_paragraph(line, line_no);
            flush();
            continue;
        }

        const std::size_t indent = leading_spaces(line);
        const bool item_position = indent <= 3 || in_list;
        if (item_position && bullet_at(line, indent)) {
            ++out.bullet_items;
            out.positions.push_back({FeatureKind::bullet_item, line_no});
            in_list = true;
        } else if (item_position && numbered_at(line, indent)) {
            ++out.numbered_items;
            out.positions.push_back({FeatureKind::numbered_item, line_no});
            in_list = true;
        } else if (indent < 4) {
            in_list = false;
        }
        add_to_paragraph(line, line_no);
    }
    flush();

    std::stable_sort(out.positions.begin(), out.positions.end(),
                     [](const FeaturePosition& a, const FeaturePosition& b) { return a.line < b.line; });
    return out;
}

double md_per_1k(const FeatureCounts& features, std::size_t words) {
    return per_1k(features.taxonomy_total(), words);
}

}  // namespace emdash
