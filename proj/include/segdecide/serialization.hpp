#pragma once

// JSON forms of configs and results. Objects use insertion-ordered keys so
// that identical inputs always produce identical bytes.

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "segdecide/analysis.hpp"
#include "segdecide/components.hpp"
#include "segdecide/error.hpp"
#include "segdecide/metrics.hpp"
#include "segdecide/priors.hpp"
#include "segdecide/synth.hpp"

namespace segdecide {

using Json = nlohmann::ordered_json;

/// Throws ConfigError unless `j` is an object.
void require_json_object(const Json& j, const char* what);
/// Throws ConfigError naming the first key of `j` not listed in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const char* what);

/// j[key] converted to T, or `fallback` when the key is absent. Conversion
/// failures become ConfigError.
template <typename T>
T json_value_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

/// Missing keys keep their defaults; unknown keys are rejected.
PriorConfig prior_config_from_json(const Json& j);
Json to_json(const PriorConfig& config);

SynthConfig synth_config_from_json(const Json& j);
Json to_json(const SynthConfig& config);

GlobalPriors global_priors_from_json(const Json& j);
Json to_json(const GlobalPriors& priors);

/// {image_id, height, width, connectivity, provenance, segments:[{class, size,
/// bbox:[min_row, min_col, max_row, max_col], runs:[[row, col_start, col_end], ...]}]}
Json to_json(const ComponentSet& set);
ComponentSet component_set_from_json(const Json& j);

Json to_json(const ConfusionMatrix& cm);
Json to_json(const ClassScores& scores);
Json to_json(const SegmentScore& score);
Json to_json(const ClassSegmentSummary& summary);
Json to_json(const SizeHistogram& hist);
Json to_json(const DominanceResult& result);

inline Json to_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

PostprocessParams postprocess_from_json(const Json& j);
Json to_json(const PostprocessParams& params);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Two-space indented dump followed by a newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace segdecide
