#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emdash/condition.hpp"
#include "emdash/textmetrics.hpp"

namespace emdash {

/// Em dash and markdown rates (per 1K words) of one model under the
/// unconstrained and prose-constrained prompts. Absent rates are skipped
/// by the distance.
struct ModelProfile {
    std::string model_name;
    std::string provider;
    std::optional<double> em_unconstrained;
    std::optional<double> em_constrained;
    std::optional<double> md_unconstrained;
    std::optional<double> md_constrained;

    bool operator==(const ModelProfile&) const = default;
};

/// The twelve measured instruction-tuned models, in published row order.
const std::vector<ModelProfile>& builtin_profiles();

/// Human essays: 3.23 em/1K regardless of prompt, no markdown rate.
const ModelProfile& human_baseline_profile();

std::vector<ModelProfile> load_profiles_csv(const std::filesystem::path& path);
std::vector<ModelProfile> parse_profiles_csv(std::string_view csv);
/// Header `model_name,provider,em_unconstrained,em_constrained,md_unconstrained,md_constrained`;
/// absent rates are empty fields.
std::string profiles_to_csv(const std::vector<ModelProfile>& profiles);

/// Feature vector used for comparison: em_u, em_c, md_u, md_c.
inline constexpr std::size_t feature_count = 4;
using FeatureVector = std::array<std::optional<double>, feature_count>;

FeatureVector features_of(const ModelProfile& p) noexcept;

/// A query has the same shape as a profile; absent features are skipped.
using AttributionQuery = FeatureVector;

/// Builds a query from measured rates. With a known condition only that
/// condition's features are set; otherwise the measurement fills both
/// conditions.
AttributionQuery query_from_rates(double em_per_1k, std::optional<double> md_per_1k,
                                  std::optional<Condition> known_condition);
AttributionQuery query_from_metrics(const MetricsRecord& m,
                                    std::optional<Condition> known_condition);

/// Per-feature mean and standard deviation (population) over a table.
/// A feature with zero spread scales by 1.
struct FeatureScaling {
    std::array<double, feature_count> mean{};
    std::array<double, feature_count> stddev{};

    static FeatureScaling fit(const std::vector<ModelProfile>& profiles);
    double z(std::size_t feature, double value) const noexcept;
};

/// Euclidean distance in z-scored space over the features both sides carry.
/// With a known condition (unconstrained or md_suppressed) only that
/// condition's em/md pair compares. Skipped features are compensated by
/// scaling the squared sum by considered / used. Throws Error(validation)
/// when no feature is usable or the condition has no profile features.
double distance(const AttributionQuery& query, const ModelProfile& profile,
                const FeatureScaling& scaling,
                std::optional<Condition> known_condition = std::nullopt);

struct RankedModel {
    std::string model_name;
    std::string provider;
    double distance = 0.0;
    double normalized_score = 0.0;
};

struct AttributionResult {
    std::vector<RankedModel> ranked;  // distance ascending, table order on ties
    AttributionQuery query_echo{};
    std::optional<Condition> known_condition;
    /// Groups of two or more models at exactly the same distance.
    std::vector<std::vector<std::string>> ties;
    /// Models that share the top-ranked model's em dash features exactly.
    std::vector<std::string> em_feature_tie;
};

/// Ranks every profile. Scores are exp(-distance) normalized to sum to 1.
/// Without an explicit scaling the z-scores are fitted on the built-in
/// twelve-model table.
AttributionResult attribute(const AttributionQuery& query,
                            const std::vector<ModelProfile>& profiles,
                            std::optional<Condition> known_condition = std::nullopt);
AttributionResult attribute(const AttributionQuery& query,
                            const std::vector<ModelProfile>& profiles,
                            const FeatureScaling& scaling,
                            std::optional<Condition> known_condition = std::nullopt);

/// em_constrained / em_unconstrained; nullopt when there is no baseline.
std::optional<double> suppression_resistance(const ModelProfile& profile);

nlohmann::json to_json(const AttributionResult& r);

}  // namespace emdash
