#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tvf/core/types.hpp"

// JSON (and JSONL) encodings of the record types. Field names are fixed; key
// order on output follows the declared schema so files diff cleanly.
namespace tvf::json_io {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const ImageRef& image);
[[nodiscard]] ImageRef image_from_json(const Json& j);

[[nodiscard]] Json to_json(const VisualAnnotation& visual);
[[nodiscard]] VisualAnnotation visual_from_json(const Json& j);

[[nodiscard]] Json to_json(const AlignedPair& pair);
[[nodiscard]] AlignedPair aligned_pair_from_json(const Json& j);

[[nodiscard]] Json to_json(const TrainingRecord& rec);
[[nodiscard]] TrainingRecord training_record_from_json(const Json& j);

[[nodiscard]] Json to_json(const BenchmarkInstance& inst);
[[nodiscard]] BenchmarkInstance benchmark_instance_from_json(const Json& j);

/// One compact JSON document per line, no trailing spaces.
[[nodiscard]] std::string to_jsonl_line(const Json& j);

/// Calls `on_line` for each non-blank line with its 1-based line number. Any
/// exception escaping the callback or the JSON parser is rethrown as
/// SchemaError carrying that line number.
void read_jsonl(std::istream& in, const std::function<void(const Json&, long)>& on_line);

template <typename T, typename Decode>
std::vector<T> read_jsonl_as(std::istream& in, Decode decode) {
    std::vector<T> out;
    read_jsonl(in, [&](const Json& j, long) { out.push_back(decode(j)); });
    return out;
}

[[nodiscard]] std::vector<TrainingRecord> read_training_records(std::istream& in);
[[nodiscard]] std::vector<BenchmarkInstance> read_benchmark_instances(std::istream& in);
[[nodiscard]] std::vector<AlignedPair> read_aligned_pairs(std::istream& in);

void write_jsonl(std::ostream& out, const std::vector<TrainingRecord>& records);
void write_jsonl(std::ostream& out, const std::vector<BenchmarkInstance>& instances);
void write_jsonl(std::ostream& out, const std::vector<AlignedPair>& pairs);

// Accessors that raise SchemaError with the key name on absence or type mismatch.
[[nodiscard]] const Json& field(const Json& j, const char* key);
[[nodiscard]] std::string string_field(const Json& j, const char* key);
[[nodiscard]] double number_field(const Json& j, const char* key);
[[nodiscard]] long long int_field(const Json& j, const char* key);
[[nodiscard]] bool bool_field(const Json& j, const char* key);

} // namespace tvf::json_io
