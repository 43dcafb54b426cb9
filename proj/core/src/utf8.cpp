#include "emdash/utf8.hpp"

#include "emdash/condition.hpp"
#include "emdash/error.hpp"

#include <cctype>

namespace emdash {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::input: return "input error";
        case ErrorKind::empty_set: return "empty-set error";
        case ErrorKind::validation: return "validation error";
        case ErrorKind::undefined_rate: return "undefined-rate error";
        case ErrorKind::empty_cell: return "empty-cell error";
        case ErrorKind::state: return "state error";
    }
    return "error";
}

std::string_view to_string(Condition c) noexcept {
    switch (c) {
        case Condition::unconstrained: return "unconstrained";
        case Condition::md_suppressed: return "md_suppressed";
        case Condition::em_suppressed: return "em_suppressed";
    }
    return "unconstrained";
}

char letter(Condition c) noexcept { return static_cast<char>('A' + static_cast<int>(c)); }

std::optional<Condition> parse_condition(std::string_view s) noexcept {
    if (s.size() == 1) {
        switch (std::toupper(static_cast<unsigned char>(s[0]))) {
            case 'A': return Condition::unconstrained;
            case 'B': return Condition::md_suppressed;
            case 'C': return Condition::em_suppressed;
            default: return std::nullopt;
        }
    }
    for (auto c : all_conditions)
        if (s == to_string(c)) return c;
    return std::nullopt;
}

}  // namespace emdash

namespace emdash::utf8 {

Decoded decode(std::string_view text, std::size_t pos) noexcept {
    const auto lead = static_cast<unsigned char>(text[pos]);
    if (lead < 0x80) return {lead, 1};

    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        return {replacement, 1};
    }
    if (pos + len > text.size()) return {replacement, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto c = static_cast<unsigned char>(text[pos + k]);
        if ((c & 0xC0) != 0x80) return {replacement, 1};
        cp = (cp << 6) | (c & 0x3F);
    }
    return {cp, len};
}

Decoded decode_before(std::string_view text, std::size_t pos) noexcept {
    if (pos == 0) return {replacement, 0};
    std::size_t start = pos - 1;
    // back up over at most three continuation bytes
    while (start > 0 && pos - start < 4 &&
           (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80)
        --start;
    const auto d = decode(text, start);
    if (start + d.length == pos) return d;
    return {replacement, 1};
}

bool is_space(char32_t cp) noexcept {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F: case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_digit(char32_t cp) noexcept { return cp >= U'0' && cp <= U'9'; }

bool is_alnum(char32_t cp) noexcept {
    if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
    if (cp == replacement) return false;
    if (cp <= 0xBF) return false;                    // C1 controls, Latin-1 punctuation
    if (cp == 0xD7 || cp == 0xF7) return false;      // multiplication, division
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, symbols, arrows, boxes
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;  // supplemental punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;  // CJK compatibility forms
    if (cp >= 0xFF01 && cp <= 0xFF0F) return false;  // fullwidth punctuation
    if (cp >= 0xFF1A && cp <= 0xFF20) return false;
    if (cp >= 0xFF3B && cp <= 0xFF40) return false;
    if (cp >= 0xFF5B && cp <= 0xFF65) return false;
    if (cp >= 0xE000 && cp <= 0xF8FF) return false;  // private use
    if (cp >= 0xFFF0 && cp <= 0xFFFF) return false;  // specials
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;  // emoji and pictographs
    return true;
}

}  // namespace emdash::utf8
