#include "emdash/dashcontext.hpp"

#include "emdash/mdfeatures.hpp"
#include "emdash/utf8.hpp"

namespace emdash {

std::string_view to_string(DashKind k) noexcept {
    switch (k) {
        case DashKind::em: return "em";
        case DashKind::en: return "en";
        case DashKind::double_hyphen: return "double_hyphen";
        case DashKind::long_hyphen_run: return "long_hyphen_run";
    }
    return "unknown";
}

std::string_view to_string(DashContext c) noexcept {
    switch (c) {
        case DashContext::thematic_break: return "thematic_break";
        case DashContext::list_marker: return "list_marker";
        case DashContext::frontmatter_delimiter: return "frontmatter_delimiter";
        case DashContext::clause_joint: return "clause_joint";
        case DashContext::numeric_range: return "numeric_range";
        case DashContext::other_inline: return "other_inline";
    }
    return "unknown";
}

bool is_structural(DashContext c) noexcept {
    return c == DashContext::thematic_break || c == DashContext::list_marker ||
           c == DashContext::frontmatter_delimiter;
}

namespace {

std::string_view strip_cr(std::string_view line) noexcept {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool is_delimiter_line(std::string_view line) noexcept {
    line = strip_cr(line);
    if (line.substr(0, 3) != "---") return false;
    return line.find_first_not_of(" \t", 3) == std::string_view::npos;
}

bool is_horizontal_space(char32_t cp) noexcept {
    return cp != U'\n' && cp != U'\r' && utf8::is_space(cp);
}

// First non-space code point left of `pos`, and whether spaces were skipped.
char32_t neighbour_left(std::string_view line, std::size_t pos) noexcept {
    while (pos > 0) {
        const auto d = utf8::decode_before(line, pos);
        if (!is_horizontal_space(d.cp)) return d.cp;
        pos -= d.length;
    }
    return 0;
}

char32_t neighbour_right(std::string_view line, std::size_t pos) noexcept {
    while (pos < line.size()) {
        const auto d = utf8::decode(line, pos);
        if (!is_horizontal_space(d.cp)) return d.cp;
        pos += d.length;
    }
    return 0;
}

struct Run {
    std::size_t begin;
    std::size_t end;
    DashKind kind;
};

template <typename F>
void for_each_run(std::string_view line, F&& f) {
    for (std::size_t i = 0; i < line.size();) {
        if (line[i] == '-') {
            std::size_t j = i;
            while (j < line.size() && line[j] == '-') ++j;
            if (j - i == 2)
                f(Run{i, j, DashKind::double_hyphen});
            else if (j - i >= 3)
                f(Run{i, j, DashKind::long_hyphen_run});
            i = j;
            continue;
        }
        if (line[i] == '\xE2' && i + 2 < line.size() && line[i + 1] == '\x80' &&
            (line[i + 2] == '\x94' || line[i + 2] == '\x93')) {
            f(Run{i, i + 3, line[i + 2] == '\x94' ? DashKind::em : DashKind::en});
            i += 3;
            continue;
        }
        ++i;
    }
}

DashContext inline_context(std::string_view line, const Run& run) noexcept {
    const char32_t left = neighbour_left(line, run.begin);
    const char32_t right = neighbour_right(line, run.end);
    if (run.kind == DashKind::em && utf8::is_alnum(left) && utf8::is_alnum(right))
        return DashContext::clause_joint;
    if (run.kind == DashKind::en && utf8::is_digit(left) && utf8::is_digit(right))
        return DashContext::numeric_range;
    return DashContext::other_inline;
}

}  // namespace

void DashScanner::classify_line(std::string_view raw, std::size_t offset, std::size_t line_no,
                                std::vector<DashOccurrence>& out, bool frontmatter_delimiter) {
    const auto line = strip_cr(raw);

    bool code = false;
    if (in_fence_) {
        code = true;
        if (fence_closes(line, FenceMarker{fence_char_, fence_len_})) in_fence_ = false;
    } else if (const auto f = fence_open(line)) {
        code = true;
        in_fence_ = true;
        fence_char_ = f->ch;
        fence_len_ = f->length;
    }

    const bool thematic = !code && is_thematic_break(line);
    std::size_t indent = 0;
    while (indent < line.size() && line[indent] == ' ') ++indent;

    for_each_run(line, [&](const Run& run) {
        DashContext ctx;
        if (code)
            ctx = DashContext::other_inline;
        else if (frontmatter_delimiter)
            ctx = DashContext::frontmatter_delimiter;
        else if (thematic)
            ctx = DashContext::thematic_break;
        else if (run.begin == indent && indent <= 3 && run.end < line.size() &&
                 line[run.end] == ' ')
            ctx = DashContext::list_marker;
        else
            ctx = inline_context(line, run);
        out.push_back({offset + run.begin, line_no, run.kind, ctx});
    });
}

void DashScanner::flush_pending() {
    for (std::size_t i = 0; i < pending_lines_.size(); ++i)
        classify_line(pending_lines_[i], pending_offsets_[i], i + 1, out_, false);
    pending_lines_.clear();
    pending_offsets_.clear();
}

void DashScanner::feed_line(std::string_view line) {
    const std::size_t offset = offset_;
    offset_ += line.size() + 1;
    ++line_no_;

    switch (front_) {
        case Front::start:
            if (line_no_ == 1 && is_delimiter_line(line)) {
                front_ = Front::open;
                pending_lines_.emplace_back(line);
                pending_offsets_.push_back(offset);
                return;
            }
            front_ = Front::done;
            break;
        case Front::open:
            if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
                // a blank line before the closing delimiter: not front matter
                front_ = Front::done;
                flush_pending();
                break;
            }
            if (is_delimiter_line(line)) {
                front_ = Front::done;
                classify_line(pending_lines_[0], pending_offsets_[0], 1, out_, true);
                for (std::size_t i = 1; i < pending_lines_.size(); ++i)
                    classify_line(pending_lines_[i], pending_offsets_[i], i + 1, out_, false);
                pending_lines_.clear();
                pending_offsets_.clear();
                classify_line(line, offset, line_no_, out_, true);
                return;
            }
            pending_lines_.emplace_back(line);
            pending_offsets_.push_back(offset);
            return;
        case Front::done:
            break;
    }
    classify_line(line, offset, line_no_, out_, false);
}

std::vector<DashOccurrence> DashScanner::finish() {
    if (front_ == Front::open) {
        front_ = Front::done;
        flush_pending();
    }
    return std::move(out_);
}

std::vector<DashOccurrence> scan(std::string_view text) {
    DashScanner scanner;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        scanner.feed_line(text.substr(start, end - start));
        start = end + 1;
    }
    return scanner.finish();
}

std::optional<double> ContextSummary::structural_fraction() const noexcept {
    if (total() == 0) return std::nullopt;
    return static_cast<double>(structural) / static_cast<double>(total());
}

ContextSummary summarize(const std::vector<DashOccurrence>& occurrences) {
    ContextSummary s;
    for (const auto& o : occurrences) {
        auto& split = s.by_kind[static_cast<std::size_t>(o.kind)];
        if (is_structural(o.context)) {
            ++s.structural;
            ++split.structural;
        } else {
            ++s.inline_;
            ++split.inline_;
        }
    }
    return s;
}

ContextSummary merge(const ContextSummary& a, const ContextSummary& b) {
    ContextSummary s;
    s.structural = a.structural + b.structural;
    s.inline_ = a.inline_ + b.inline_;
    for (std::size_t k = 0; k < dash_kind_count; ++k) {
        s.by_kind[k].structural = a.by_kind[k].structural + b.by_kind[k].structural;
        s.by_kind[k].inline_ = a.by_kind[k].inline_ + b.by_kind[k].inline_;
    }
    return s;
}

AltRepresentationResult alt_representation_check(std::string_view text) {
    AltRepresentationResult r;
    auto bump = [](DashCounts& c, DashKind k) {
        switch (k) {
            case DashKind::em: ++c.em; break;
            case DashKind::en: ++c.en; break;
            case DashKind::double_hyphen: ++c.double_hyphen; break;
            case DashKind::long_hyphen_run: ++c.long_hyphen_run; break;
        }
    };
    for (const auto& o : scan(text)) {
        bump(r.counts, o.kind);
        if (!is_structural(o.context)) bump(r.inline_counts, o.kind);
    }

    std::string kinds;
    auto note = [&](std::size_t n, std::string_view name) {
        if (n == 0) return;
        if (!kinds.empty()) kinds += ", ";
        kinds += name;
    };
    note(r.inline_counts.em, "em");
    note(r.inline_counts.en, "en");
    note(r.inline_counts.double_hyphen, "double_hyphen");
    r.verdict = kinds.empty() ? std::string(no_dash_transitions_verdict)
                              : "inline dash transitions: " + kinds;
    return r;
}

AltRepresentationResult alt_representation_check(const TextSample& sample) {
    return alt_representation_check(sample.text);
}

nlohmann::json to_json(const ContextSummary& s) {
    nlohmann::json by_kind = nlohmann::json::object();
    for (std::size_t k = 0; k < dash_kind_count; ++k)
        by_kind[std::string(to_string(static_cast<DashKind>(k)))] = {
            {"structural", s.by_kind[k].structural}, {"inline", s.by_kind[k].inline_}};
    const auto fraction = s.structural_fraction();
    return {{"total", s.total()},
            {"structural", s.structural},
            {"inline", s.inline_},
            {"structural_fraction", fraction ? nlohmann::json(*fraction) : nlohmann::json(nullptr)},
            {"by_kind", by_kind}};
}

}  // namespace emdash
