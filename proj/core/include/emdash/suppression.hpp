#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emdash/condition.hpp"
#include "emdash/corpus.hpp"
#include "emdash/textmetrics.hpp"

namespace emdash {

inline constexpr std::string_view prose_only_instruction =
    "Write in flowing prose paragraphs only. Do not use any markdown formatting, headers, "
    "bullet points, bold text, or lists.";
inline constexpr std::string_view no_em_dash_instruction = "Do not use em dashes.";

/// A: "Write a N-word essay about T."  B: A + prose-only instruction.
/// C: B + em dash prohibition. Throws Error(validation) on an empty topic
/// or a non-positive word target.
std::string build_prompt(std::string_view topic, Condition condition, int target_words);

/// Recovers the condition a prompt was built for (strongest suffix wins).
Condition prompt_condition(std::string_view prompt) noexcept;

/// Recovers N from "Write a N-word essay"; nullopt when absent.
std::optional<int> prompt_target_words(std::string_view prompt) noexcept;

/// Pooled counts for one (model, condition) cell. Rates are always
/// 1000 * pooled count / pooled words, never a mean of per-sample rates.
struct ConditionSummary {
    std::string model_name;
    std::string provider;
    Condition condition = Condition::unconstrained;
    std::size_t n_samples = 0;
    std::size_t total_words = 0;
    DashCounts dash;
    std::size_t md_feature_total = 0;

    double em_per_1k() const;
    double md_per_1k() const;

    bool operator==(const ConditionSummary&) const = default;
};

/// Sums counts of two summaries of the same cell.
ConditionSummary pool(const ConditionSummary& a, const ConditionSummary& b);

/// Pools every model sample of `model_name` under `condition`. Samples
/// with no words are skipped. Throws Error(empty_cell) when nothing with
/// words > 0 matches.
ConditionSummary aggregate(const SampleSet& samples, std::string_view model_name,
                           Condition condition);

/// Every (model, condition) cell present in the set, in first-seen model
/// order then condition order.
std::vector<ConditionSummary> aggregate_all(const SampleSet& samples);

/// (u - c) / u; nullopt marks "no baseline" when u == 0. Negative values
/// are returned as-is.
std::optional<double> reduction(double rate_unconstrained, double rate_constrained);

/// Integer percent, half-up: 0.1431 -> "14%". nullopt -> "n/a".
std::string format_percent(std::optional<double> fraction);

struct HumanBaselineStats {
    std::size_t essays = 0;
    std::size_t total_words = 0;
    std::size_t total_em = 0;
    double weighted_mean_per_1k = 0.0;
    double median_per_1k = 0.0;
    double min_per_1k = 0.0;
    double max_per_1k = 0.0;
};

/// Weighted mean = 1000 * total em / total words; median, min and max are
/// over per-essay rates. Human samples only; throws Error(empty_cell)
/// when there are none with words.
HumanBaselineStats human_baseline_stats(const SampleSet& samples);

/// Published reference values for eight human essays. Shipped as
/// constants, not recomputed.
struct ReferenceBaseline {
    std::size_t essays;
    std::size_t total_words;
    double weighted_mean_per_1k;
    double median_per_1k;
    double min_per_1k;
    double max_per_1k;
};

inline constexpr ReferenceBaseline reference_human_baseline{8, 57232, 3.23, 3.83, 0.33, 17.12};

}  // namespace emdash
