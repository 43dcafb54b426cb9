#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emdash/condition.hpp"

namespace emdash {

enum class Source { model, human };

std::string_view to_string(Source s) noexcept;

using Timestamp = std::chrono::sys_seconds;

/// ISO-8601 UTC with a trailing `Z`, second precision.
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view s);
Timestamp now_utc();

/// One generated or human text plus the metadata it was collected under.
///
/// A human sample has no provider, model or condition. A model sample has
/// all of provider, model_name, condition and topic. The text is stored
/// exactly as received.
struct TextSample {
    std::string id;
    std::string text;
    Source source = Source::human;
    std::optional<std::string> provider;
    std::optional<std::string> model_name;
    std::optional<Condition> condition;  // nullopt serializes as "none"
    std::optional<std::string> topic;
    std::optional<int> target_words;
    Timestamp collected_at{};
    nlohmann::json generation_params;  // null or object

    bool operator==(const TextSample&) const = default;
};

nlohmann::json to_json(const TextSample& s);
TextSample sample_from_json(const nlohmann::json& j);

/// Every invariant violation as one readable issue; empty when valid.
std::vector<std::string> validate_sample(const TextSample& s);

class SampleSet {
public:
    SampleSet() = default;
    /// Throws Error(validation) on duplicate ids.
    SampleSet(std::vector<TextSample> samples, std::string provenance);

    const std::vector<TextSample>& samples() const noexcept { return samples_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const TextSample* find(std::string_view id) const noexcept;

    auto begin() const noexcept { return samples_.begin(); }
    auto end() const noexcept { return samples_.end(); }

    bool operator==(const SampleSet& o) const { return samples_ == o.samples_; }

private:
    std::vector<TextSample> samples_;
    std::string provenance_;
};

struct LoadResult {
    SampleSet set;
    std::size_t skipped = 0;
    std::vector<std::string> diagnostics;  // one per skipped line
};

/// Reads a JSONL sample store. Malformed lines (bad JSON, schema errors,
/// duplicate ids) are skipped and counted. Throws Error(input) when the
/// file cannot be read and Error(empty_set) when nothing survives.
LoadResult load_samples(const std::filesystem::path& path);

/// Serializes one sample per line.
void write_samples(const SampleSet& set, const std::filesystem::path& path);
std::string to_jsonl(const SampleSet& set);

/// Metadata shared by every sample produced by ingest_plaintext. Only the
/// fields meaningful for human text are accepted; claiming a model source
/// is a validation error.
struct IngestMetadata {
    Source source = Source::human;
    std::optional<std::string> provider;
    std::optional<std::string> model_name;
    std::optional<Condition> condition;
    std::optional<std::string> topic;
    std::optional<Timestamp> collected_at;
};

/// One human sample per regular file in `directory` (sorted by filename).
/// Ids are filename stems; a repeated stem gets `-2`, `-3`, ... appended.
SampleSet ingest_plaintext(const std::filesystem::path& directory,
                           const IngestMetadata& metadata = {});

/// Reads a whole file as bytes. Throws Error(input).
std::string read_file(const std::filesystem::path& path);

/// Append-only JSONL writer. All writes go through one mutex so several
/// producer threads may share an appender.
class SampleAppender {
public:
    explicit SampleAppender(const std::filesystem::path& path);

    void append(const TextSample& sample);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mutex_;
};

}  // namespace emdash
