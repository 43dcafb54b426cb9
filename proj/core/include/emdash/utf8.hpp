#pragma once

#include <cstddef>
#include <string_view>

namespace emdash::utf8 {

inline constexpr char32_t replacement = 0xFFFD;

struct Decoded {
    char32_t cp;
    std::size_t length;  // bytes consumed, always >= 1
};

/// Decodes one code point at `pos`. Malformed sequences yield U+FFFD and
/// consume a single byte so scanning always makes progress.
Decoded decode(std::string_view text, std::size_t pos) noexcept;

/// Decodes the code point that ends immediately before `pos`.
Decoded decode_before(std::string_view text, std::size_t pos) noexcept;

/// ASCII whitespace plus the Unicode space separators and line/paragraph
/// separators.
bool is_space(char32_t cp) noexcept;

/// ASCII letters and digits, and any non-ASCII code point outside the
/// punctuation, symbol, and control blocks.
bool is_alnum(char32_t cp) noexcept;

bool is_digit(char32_t cp) noexcept;

}  // namespace emdash::utf8
