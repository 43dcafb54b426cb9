#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace emdash {

/// Prompt condition, ordered by suppression strength.
enum class Condition {
    unconstrained = 0,  // A
    md_suppressed = 1,  // B
    em_suppressed = 2,  // C
};

inline constexpr Condition all_conditions[] = {
    Condition::unconstrained, Condition::md_suppressed, Condition::em_suppressed};

/// "unconstrained", "md_suppressed", "em_suppressed".
std::string_view to_string(Condition c) noexcept;

/// "A", "B", "C".
char letter(Condition c) noexcept;

/// Accepts the long names and the letters A/B/C (case-insensitive).
std::optional<Condition> parse_condition(std::string_view s) noexcept;

}  // namespace emdash
