#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdash/condition.hpp"
#include "emdash/suppression.hpp"

namespace emdash {

enum class ColumnMetric {
    em_rate,       // pooled em dashes per 1K words
    md_rate,       // pooled taxonomy features per 1K words
    md_total,      // raw feature count
    words,         // pooled word count
    em_reduction,  // reduction of em rate from `condition` to `versus`
};

struct ReportColumn {
    std::string header;
    ColumnMetric metric = ColumnMetric::em_rate;
    Condition condition = Condition::unconstrained;
    std::optional<Condition> versus;  // em_reduction only
};

/// A table layout. Shapes are plain data so new layouts can be loaded from
/// JSON without code changes.
struct ReportShape {
    std::string name;
    std::string title;
    bool show_provider = false;
    std::vector<ReportColumn> columns;
    /// Rows sort by this condition's em rate, descending. Rows without it
    /// go last in input order.
    Condition sort_condition = Condition::unconstrained;
};

/// table1: two-condition em and markdown rates. table2: three-condition
/// em gradient. table3: words, em rate and raw feature totals.
const ReportShape& builtin_shape(std::string_view name);
std::vector<std::string> builtin_shape_names();
ReportShape shape_from_json(const nlohmann::json& j);

struct ReportRow {
    std::string model_name;
    std::string provider;
    std::vector<std::optional<double>> cells;  // nullopt = absent, never 0
};

struct AbsentCell {
    std::string model_name;
    std::string column;
};

struct GradientReport {
    ReportShape shape;
    std::vector<ReportRow> rows;
    std::vector<AbsentCell> absent;
    std::vector<std::string> footnotes;
};

GradientReport gradient_report(const std::vector<ConditionSummary>& summaries,
                               const ReportShape& shape);

enum class ReportFormat { text, csv, markdown };

std::optional<ReportFormat> parse_report_format(std::string_view s) noexcept;

/// Renders cells at report precision: rates with two decimals, counts as
/// integers, reductions as whole percents, absent cells as "n/a" (text,
/// markdown) or an empty field (csv). Footnotes are omitted from csv.
std::string render(const GradientReport& report, ReportFormat format);

/// Reads back the csv rendering. Cells come back at render precision.
std::vector<ReportRow> parse_report_csv(std::string_view csv, const ReportShape& shape);

}  // namespace emdash
