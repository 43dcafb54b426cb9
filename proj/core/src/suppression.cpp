#include "emdash/suppression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "emdash/error.hpp"

namespace emdash {

std::string build_prompt(std::string_view topic, Condition condition, int target_words) {
    if (topic.empty()) throw Error(ErrorKind::validation, "prompt topic is empty");
    if (target_words <= 0) throw Error(ErrorKind::validation, "target_words must be positive");

    std::string prompt = "Write a " + std::to_string(target_words) + "-word essay about ";
    prompt.append(topic);
    prompt += '.';
    if (condition >= Condition::md_suppressed) {
        prompt += ' ';
        prompt.append(prose_only_instruction);
    }
    if (condition >= Condition::em_suppressed) {
        prompt += ' ';
        prompt.append(no_em_dash_instruction);
    }
    return prompt;
}

Condition prompt_condition(std::string_view prompt) noexcept {
    if (prompt.find(no_em_dash_instruction) != std::string_view::npos)
        return Condition::em_suppressed;
    if (prompt.find(prose_only_instruction) != std::string_view::npos)
        return Condition::md_suppressed;
    return Condition::unconstrained;
}

std::optional<int> prompt_target_words(std::string_view prompt) noexcept {
    constexpr std::string_view lead = "Write a ";
    const auto at = prompt.find(lead);
    if (at == std::string_view::npos) return std::nullopt;
    const char* first = prompt.data() + at + lead.size();
    const char* last = prompt.data() + prompt.size();
    int n = 0;
    const auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc{} || ptr == first || n <= 0) return std::nullopt;
    if (std::string_view(ptr, static_cast<std::size_t>(last - ptr)).substr(0, 5) != "-word")
        return std::nullopt;
    return n;
}

double ConditionSummary::em_per_1k() const { return per_1k(dash.em, total_words); }
double ConditionSummary::md_per_1k() const { return per_1k(md_feature_total, total_words); }

ConditionSummary pool(const ConditionSummary& a, const ConditionSummary& b) {
    if (a.model_name != b.model_name || a.condition != b.condition)
        throw Error(ErrorKind::validation, "cannot pool different cells");
    ConditionSummary s = a;
    s.n_samples += b.n_samples;
    s.total_words += b.total_words;
    s.dash += b.dash;
    s.md_feature_total += b.md_feature_total;
    return s;
}

namespace {

bool matches(const TextSample& s, std::string_view model_name, Condition condition) {
    return s.source == Source::model && s.model_name && *s.model_name == model_name &&
           s.condition && *s.condition == condition;
}

void accumulate(ConditionSummary& cell, const TextSample& s) {
    const auto words = count_words(s.text);
    if (words == 0) return;
    ++cell.n_samples;
    cell.total_words += words;
    cell.dash += count_dashes(s.text);
    cell.md_feature_total += detect_features(s.text).taxonomy_total();
    if (cell.provider.empty() && s.provider) cell.provider = *s.provider;
}

}  // namespace

ConditionSummary aggregate(const SampleSet& samples, std::string_view model_name,
                           Condition condition) {
    ConditionSummary cell;
    cell.model_name = std::string(model_name);
    cell.condition = condition;
    for (const auto& s : samples)
        if (matches(s, model_name, condition)) accumulate(cell, s);
    if (cell.n_samples == 0)
        throw Error(ErrorKind::empty_cell, "no samples with words for " + cell.model_name + " / " +
                                               std::string(to_string(condition)));
    return cell;
}

std::vector<ConditionSummary> aggregate_all(const SampleSet& samples) {
    std::vector<std::string> models;
    for (const auto& s : samples)
        if (s.source == Source::model && s.model_name &&
            std::find(models.begin(), models.end(), *s.model_name) == models.end())
            models.push_back(*s.model_name);

    std::vector<ConditionSummary> cells;
    for (const auto& model : models) {
        for (auto condition : all_conditions) {
            ConditionSummary cell;
            cell.model_name = model;
            cell.condition = condition;
            for (const auto& s : samples)
                if (matches(s, model, condition)) accumulate(cell, s);
            if (cell.n_samples > 0) cells.push_back(std::move(cell));
        }
    }
    return cells;
}

std::optional<double> reduction(double rate_unconstrained, double rate_constrained) {
    if (rate_unconstrained < 0 || rate_constrained < 0)
        throw Error(ErrorKind::validation, "rates must be non-negative");
    if (rate_unconstrained == 0) return std::nullopt;
    return (rate_unconstrained - rate_constrained) / rate_unconstrained;
}

std::string format_percent(std::optional<double> fraction) {
    if (!fraction) return "n/a";
    const double pct = *fraction * 100.0;
    const auto rounded = static_cast<long long>(std::floor(pct + 0.5 + 1e-9 * std::max(1.0, std::fabs(pct))));
    return std::to_string(rounded) + "%";
}

HumanBaselineStats human_baseline_stats(const SampleSet& samples) {
    HumanBaselineStats st;
    std::vector<double> rates;
    for (const auto& s : samples) {
        if (s.source != Source::human) continue;
        const auto words = count_words(s.text);
        if (words == 0) continue;
        const auto em = count_dashes(s.text).em;
        ++st.essays;
        st.total_words += words;
        st.total_em += em;
        rates.push_back(per_1k(em, words));
    }
    if (rates.empty()) throw Error(ErrorKind::empty_cell, "no human samples with words");

    std::sort(rates.begin(), rates.end());
    st.weighted_mean_per_1k = per_1k(st.total_em, st.total_words);
    const auto n = rates.size();
    st.median_per_1k = n % 2 == 1 ? rates[n / 2] : (rates[n / 2 - 1] + rates[n / 2]) / 2.0;
    st.min_per_1k = rates.front();
    st.max_per_1k = rates.back();
    return st;
}

}  // namespace emdash
