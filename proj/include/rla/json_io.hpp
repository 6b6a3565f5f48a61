#pragma once

// JSON documents exchanged between CLI subcommands. Every document carries
// `schema_version` (currently 1) and a `kind` tag.

#include <string>

#include <nlohmann/json.hpp>

#include "rla/selection.hpp"

namespace rla {

inline constexpr int kSchemaVersion = 1;

std::string method_name(const AnyPlan& plan);

nlohmann::json to_json(const UniformPlan& plan);
nlohmann::json to_json(const WeightedPlan& plan);
nlohmann::json to_json(const AnyPlan& plan);
AnyPlan plan_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SelectionRecord& record);
SelectionRecord record_from_json(const nlohmann::json& doc);

/// FNV-1a 64 of the plan's canonical JSON, as 16 hex digits.
std::string plan_fingerprint(const AnyPlan& plan);

/// Stable text form used for files: 2-space indent, trailing newline.
std::string dump_document(const nlohmann::json& doc);

}  // namespace rla
