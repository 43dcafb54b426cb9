#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emdash/corpus.hpp"
#include "emdash/textmetrics.hpp"

namespace emdash {

enum class DashKind { em, en, double_hyphen, long_hyphen_run };
inline constexpr std::size_t dash_kind_count = 4;

enum class DashContext {
    // structural
    thematic_break,
    list_marker,
    frontmatter_delimiter,
    // inline
    clause_joint,
    numeric_range,
    other_inline,
};

std::string_view to_string(DashKind k) noexcept;
std::string_view to_string(DashContext c) noexcept;
bool is_structural(DashContext c) noexcept;

struct DashOccurrence {
    std::size_t byte_offset;
    std::size_t line;  // 1-based
    DashKind kind;
    DashContext context;

    bool operator==(const DashOccurrence&) const = default;
};

/// Line-at-a-time classifier. Memory is bounded by the longest line, plus
/// the front matter block while it is still open.
///
/// Structural contexts:
///   - frontmatter_delimiter: a `---` first line and the next `---` line
///     before any blank line
///   - thematic_break: every run on a thematic-break line
///   - list_marker: a dash run that is the first thing on a line (at most
///     three spaces in) and is followed by a space
/// Everything else is inline. Inside fenced code everything is other_inline.
class DashScanner {
public:
    /// `line` excludes the '\n'; a trailing '\r' is tolerated.
    void feed_line(std::string_view line);

    /// Flushes any pending front matter and returns all occurrences.
    std::vector<DashOccurrence> finish();

private:
    void classify_line(std::string_view line, std::size_t offset, std::size_t line_no,
                       std::vector<DashOccurrence>& out, bool frontmatter_delimiter);
    void flush_pending();

    std::vector<DashOccurrence> out_;
    std::size_t offset_ = 0;
    std::size_t line_no_ = 0;

    enum class Front { start, open, done } front_ = Front::start;
    std::vector<std::string> pending_lines_;
    std::vector<std::size_t> pending_offsets_;

    bool in_fence_ = false;
    char fence_char_ = 0;
    std::size_t fence_len_ = 0;
};

/// Offsets strictly increasing.
std::vector<DashOccurrence> scan(std::string_view text);

struct KindSplit {
    std::size_t structural = 0;
    std::size_t inline_ = 0;

    bool operator==(const KindSplit&) const = default;
};

struct ContextSummary {
    std::size_t structural = 0;
    std::size_t inline_ = 0;
    std::array<KindSplit, dash_kind_count> by_kind{};

    std::size_t total() const noexcept { return structural + inline_; }
    /// Absent when there are no occurrences.
    std::optional<double> structural_fraction() const noexcept;

    const KindSplit& of(DashKind k) const noexcept { return by_kind[static_cast<std::size_t>(k)]; }

    bool operator==(const ContextSummary&) const = default;
};

ContextSummary summarize(const std::vector<DashOccurrence>& occurrences);

/// Commutative and associative.
ContextSummary merge(const ContextSummary& a, const ContextSummary& b);

inline constexpr std::string_view no_dash_transitions_verdict = "no dash-mediated transitions";

struct AltRepresentationResult {
    DashCounts counts;         // every occurrence
    DashCounts inline_counts;  // occurrences outside structural contexts
    std::string verdict;
};

/// Checks whether a text joins clauses with any dash representation. The
/// verdict is `no_dash_transitions_verdict` iff no em dash, en dash, or
/// double hyphen appears inline; otherwise it names the inline kinds.
AltRepresentationResult alt_representation_check(std::string_view text);
AltRepresentationResult alt_representation_check(const TextSample& sample);

nlohmann::json to_json(const ContextSummary& s);

}  // namespace emdash
