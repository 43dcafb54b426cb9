#include "emdash/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "emdash/error.hpp"

namespace emdash {

namespace {

ReportShape make_table1() {
    ReportShape s;
    s.name = "table1";
    s.title = "Two-condition suppression test";
    s.show_provider = true;
    s.columns = {
        {"Em/1K Unconstr.", ColumnMetric::em_rate, Condition::unconstrained, std::nullopt},
        {"Em/1K Constr.", ColumnMetric::em_rate, Condition::md_suppressed, std::nullopt},
        {"MD/1K Unconstr.", ColumnMetric::md_rate, Condition::unconstrained, std::nullopt},
        {"MD/1K Constr.", ColumnMetric::md_rate, Condition::md_suppressed, std::nullopt},
        {"Em Reduction", ColumnMetric::em_reduction, Condition::unconstrained,
         Condition::md_suppressed},
    };
    return s;
}

ReportShape make_table2() {
    ReportShape s;
    s.name = "table2";
    s.title = "Three-condition suppression gradient (em dashes / 1K words)";
    s.columns = {
        {"Unconstr.", ColumnMetric::em_rate, Condition::unconstrained, std::nullopt},
        {"MD Suppr.", ColumnMetric::em_rate, Condition::md_suppressed, std::nullopt},
        {"EM Suppr.", ColumnMetric::em_rate, Condition::em_suppressed, std::nullopt},
    };
    return s;
}

ReportShape make_table3() {
    ReportShape s;
    s.name = "table3";
    s.title = "Base versus instruction-tuned comparison";
    s.columns = {
        {"Words", ColumnMetric::words, Condition::unconstrained, std::nullopt},
        {"Em Dashes/1K", ColumnMetric::em_rate, Condition::unconstrained, std::nullopt},
        {"MD Features", ColumnMetric::md_total, Condition::unconstrained, std::nullopt},
    };
    return s;
}

const std::map<std::string, ReportShape, std::less<>>& shapes() {
    static const std::map<std::string, ReportShape, std::less<>> table{
        {"table1", make_table1()}, {"table2", make_table2()}, {"table3", make_table3()}};
    return table;
}

std::optional<ColumnMetric> parse_metric(std::string_view s) {
    if (s == "em_rate") return ColumnMetric::em_rate;
    if (s == "md_rate") return ColumnMetric::md_rate;
    if (s == "md_total") return ColumnMetric::md_total;
    if (s == "words") return ColumnMetric::words;
    if (s == "em_reduction") return ColumnMetric::em_reduction;
    return std::nullopt;
}

Condition require_condition(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw Error(ErrorKind::validation, std::string("shape column needs '") + key + "'");
    const auto c = parse_condition(j[key].get<std::string>());
    if (!c) throw Error(ErrorKind::validation, "unknown condition " + j[key].dump());
    return *c;
}

std::string format_cell(ColumnMetric metric, const std::optional<double>& v) {
    if (!v) return {};
    switch (metric) {
        case ColumnMetric::em_rate:
        case ColumnMetric::md_rate: return format_rate(*v);
        case ColumnMetric::md_total:
        case ColumnMetric::words: return std::to_string(std::llround(*v));
        case ColumnMetric::em_reduction: return format_percent(*v);
    }
    return {};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

const ReportShape& builtin_shape(std::string_view name) {
    const auto it = shapes().find(name);
    if (it == shapes().end())
        throw Error(ErrorKind::validation, "unknown report shape '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> builtin_shape_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : shapes()) names.push_back(name);
    return names;
}

ReportShape shape_from_json(const nlohmann::json& j) {
    ReportShape s;
    s.name = j.value("name", "custom");
    s.title = j.value("title", s.name);
    s.show_provider = j.value("show_provider", false);
    if (j.contains("sort_condition")) s.sort_condition = require_condition(j, "sort_condition");
    if (!j.contains("columns") || !j["columns"].is_array() || j["columns"].empty())
        throw Error(ErrorKind::validation, "shape needs a non-empty 'columns' array");
    for (const auto& c : j["columns"]) {
        ReportColumn col;
        col.header = c.value("header", "");
        const auto metric = parse_metric(c.value("metric", ""));
        if (!metric) throw Error(ErrorKind::validation, "unknown column metric in " + c.dump());
        col.metric = *metric;
        col.condition = require_condition(c, "condition");
        if (col.metric == ColumnMetric::em_reduction) col.versus = require_condition(c, "versus");
        if (col.header.empty()) col.header = c.value("metric", "") + " " + letter(col.condition);
        s.columns.push_back(std::move(col));
    }
    return s;
}

GradientReport gradient_report(const std::vector<ConditionSummary>& summaries,
                               const ReportShape& shape) {
    GradientReport report;
    report.shape = shape;

    std::vector<std::string> order;
    std::map<std::pair<std::string, Condition>, ConditionSummary> cells;
    std::map<std::string, std::string> providers;
    for (const auto& s : summaries) {
        if (std::find(order.begin(), order.end(), s.model_name) == order.end())
            order.push_back(s.model_name);
        if (!s.provider.empty()) providers.emplace(s.model_name, s.provider);
        const auto key = std::make_pair(s.model_name, s.condition);
        if (const auto it = cells.find(key); it != cells.end())
            it->second = pool(it->second, s);
        else
            cells.emplace(key, s);
    }

    auto find = [&](const std::string& model, Condition c) -> const ConditionSummary* {
        const auto it = cells.find({model, c});
        return it == cells.end() || it->second.total_words == 0 ? nullptr : &it->second;
    };

    bool has_reduction = false;
    bool has_md = false;
    for (const auto& model : order) {
        ReportRow row;
        row.model_name = model;
        if (const auto p = providers.find(model); p != providers.end()) row.provider = p->second;
        for (const auto& col : shape.columns) {
            std::optional<double> value;
            const auto* cell = find(model, col.condition);
            bool absent = cell == nullptr;
            switch (col.metric) {
                case ColumnMetric::em_rate:
                    if (cell) value = cell->em_per_1k();
                    break;
                case ColumnMetric::md_rate:
                    has_md = true;
                    if (cell) value = cell->md_per_1k();
                    break;
                case ColumnMetric::md_total:
                    has_md = true;
                    if (cell) value = static_cast<double>(cell->md_feature_total);
                    break;
                case ColumnMetric::words:
                    if (cell) value = static_cast<double>(cell->total_words);
                    break;
                case ColumnMetric::em_reduction: {
                    has_reduction = true;
                    const auto* other = find(model, col.versus.value_or(Condition::md_suppressed));
                    absent = !cell || !other;
                    if (!absent) {
                        value = reduction(cell->em_per_1k(), other->em_per_1k());
                        if (value && *value < 0)
                            report.footnotes.push_back(
                                model + ": em dash rate rises under suppression (" +
                                format_rate(cell->em_per_1k()) + " to " +
                                format_rate(other->em_per_1k()) +
                                "); the difference is within sampling variability.");
                    }
                    break;
                }
            }
            if (absent) report.absent.push_back({model, col.header});
            row.cells.push_back(value);
        }
        report.rows.push_back(std::move(row));
    }

    // Sort by em rate under the shape's sort condition, descending; rows
    // without that cell keep input order at the end.
    std::vector<std::pair<std::optional<double>, std::size_t>> keys;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto* cell = find(report.rows[i].model_name, shape.sort_condition);
        keys.emplace_back(cell ? std::optional<double>(cell->em_per_1k()) : std::nullopt, i);
    }
    std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
        if (a.first.has_value() != b.first.has_value()) return a.first.has_value();
        if (!a.first) return false;
        return *a.first > *b.first;
    });
    std::vector<ReportRow> sorted;
    for (const auto& [_, i] : keys) sorted.push_back(std::move(report.rows[i]));
    report.rows = std::move(sorted);

    if (has_md)
        report.footnotes.push_back(
            "Markdown features are headings, bullet points, bold text and numbered lists; each "
            "list line counts as one item.");
    if (has_reduction)
        report.footnotes.push_back("Reduction is (unconstrained - constrained) / unconstrained; "
                                   "n/a marks a zero baseline.");
    if (!report.absent.empty()) {
        std::string line = "Absent cells:";
        for (std::size_t i = 0; i < report.absent.size(); ++i)
            line += (i ? "; " : " ") + report.absent[i].model_name + " / " + report.absent[i].column;
        report.footnotes.push_back(line);
    }
    return report;
}

std::optional<ReportFormat> parse_report_format(std::string_view s) noexcept {
    if (s == "text" || s == "table") return ReportFormat::text;
    if (s == "csv") return ReportFormat::csv;
    if (s == "markdown" || s == "md") return ReportFormat::markdown;
    return std::nullopt;
}

std::string render(const GradientReport& report, ReportFormat format) {
    const auto& shape = report.shape;
    std::vector<std::string> header{"Model"};
    if (shape.show_provider || format == ReportFormat::csv) header.emplace_back("Provider");
    const std::size_t lead = header.size();
    for (const auto& c : shape.columns) header.push_back(c.header);

    std::vector<std::vector<std::string>> body;
    for (const auto& row : report.rows) {
        std::vector<std::string> r{row.model_name};
        if (lead == 2) r.push_back(row.provider);
        for (std::size_t i = 0; i < shape.columns.size(); ++i) {
            auto cell = format_cell(shape.columns[i].metric, row.cells[i]);
            if (cell.empty() && format != ReportFormat::csv) cell = "n/a";
            r.push_back(std::move(cell));
        }
        body.push_back(std::move(r));
    }

    std::ostringstream out;
    if (format == ReportFormat::csv) {
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_field(header[i]);
        out << '\n';
        for (const auto& r : body) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
            out << '\n';
        }
        return out.str();
    }

    if (format == ReportFormat::markdown) {
        out << "**" << shape.title << "**\n\n|";
        for (const auto& h : header) out << ' ' << h << " |";
        out << "\n|";
        for (std::size_t i = 0; i < header.size(); ++i) out << (i < lead ? "---|" : "---:|");
        out << '\n';
        for (const auto& r : body) {
            out << '|';
            for (const auto& c : r) out << ' ' << c << " |";
            out << '\n';
        }
        if (!report.footnotes.empty()) out << '\n';
        for (const auto& f : report.footnotes) out << "> " << f << '\n';
        return out.str();
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : body)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << "  ";
            const auto pad = std::string(width[i] - r[i].size(), ' ');
            if (i < lead)
                out << r[i] << (i + 1 < r.size() ? pad : "");
            else
                out << pad << r[i];
        }
        out << '\n';
    };
    out << shape.title << '\n';
    emit(header);
    std::size_t total = 0;
    for (auto w : width) total += w;
    out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& r : body) emit(r);
    for (const auto& f : report.footnotes) out << "  * " << f << '\n';
    return out.str();
}

std::vector<ReportRow> parse_report_csv(std::string_view csv, const ReportShape& shape) {
    std::vector<ReportRow> rows;
    std::size_t start = 0;
    bool header = true;
    while (start < csv.size()) {
        auto end = csv.find('\n', start);
        if (end == std::string_view::npos) end = csv.size();
        auto line = csv.substr(start, end - start);
        start = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (header) {
            header = false;
            if (fields.size() != shape.columns.size() + 2)
                throw Error(ErrorKind::input, "report csv header does not match shape");
            continue;
        }
        if (fields.size() != shape.columns.size() + 2)
            throw Error(ErrorKind::input, "report csv row has the wrong field count");
        ReportRow row;
        row.model_name = fields[0];
        row.provider = fields[1];
        for (std::size_t i = 0; i < shape.columns.size(); ++i) {
            const auto& f = fields[i + 2];
            if (f.empty() || f == "n/a") {
                row.cells.emplace_back();
            } else if (f.back() == '%') {
                row.cells.emplace_back(std::stod(f.substr(0, f.size() - 1)) / 100.0);
            } else {
                row.cells.emplace_back(std::stod(f));
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace emdash
