#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace emdash {

enum class FeatureKind {
    heading,
    bullet_item,
    numbered_item,
    bold_span,
    fenced_code_block,
    thematic_break,
};

std::string_view to_string(FeatureKind k) noexcept;

struct FeaturePosition {
    FeatureKind kind;
    std::size_t line;  // 1-based

    bool operator==(const FeaturePosition&) const = default;
};

/// Markdown feature tallies. Only headings, bullets, numbered items and
/// bold spans make up the reported total; fences and thematic breaks are
/// tracked but never enter it.
struct FeatureCounts {
    std::size_t headings = 0;
    std::size_t bullet_items = 0;
    std::size_t numbered_items = 0;
    std::size_t bold_spans = 0;
    std::size_t fenced_code_blocks = 0;
    std::size_t thematic_breaks = 0;
    std::vector<FeaturePosition> positions;  // ascending by line

    std::size_t taxonomy_total() const noexcept {
        return headings + bullet_items + numbered_items + bold_spans;
    }

    bool operator==(const FeatureCounts&) const = default;
};

/// Block-level shape of a single line, outside of any fenced code block.
enum class LineKind {
    blank,
    fence,
    thematic_break,
    atx_heading,
    bullet_item,
    numbered_item,
    text,
};

/// Classifies a line in isolation (no list or fence context). A trailing
/// '\r' is ignored. Thematic break wins over bullet item.
LineKind classify_line(std::string_view line) noexcept;

bool is_thematic_break(std::string_view line) noexcept;

/// Opening code fence: <=3 spaces, then >=3 backticks or tildes. A
/// backtick fence may not carry backticks in its info string.
struct FenceMarker {
    char ch;
    std::size_t length;
};
std::optional<FenceMarker> fence_open(std::string_view line) noexcept;
bool fence_closes(std::string_view line, const FenceMarker& open) noexcept;
bool is_atx_heading(std::string_view line) noexcept;
bool is_bullet_item(std::string_view line) noexcept;
bool is_numbered_item(std::string_view line) noexcept;

/// Scans `text` line by line with the CommonMark-subset rules:
///   - ATX heading: <=3 spaces, 1-6 '#', then space or end of line
///   - bullet: <=3 spaces, one of - * +, then space
///   - numbered: <=3 spaces, 1-9 digits, '.' or ')', then space
///   - thematic break: >=3 of the same - * _ with only spaces between
///   - fenced code: ``` or ~~~; nothing inside an open fence counts
///   - bold: shortest **...** or __...__ pair inside one paragraph
/// List lines indented four or more spaces count as items only while a
/// list is open (nested items).
FeatureCounts detect_features(std::string_view text);

/// Headings, bullets, numbered items and bold spans per 1,000 words. Throws Error(undefined_rate)
/// when words == 0.
double md_per_1k(const FeatureCounts& features, std::size_t words);

}  // namespace emdash
