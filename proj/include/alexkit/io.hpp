#pragma once

// Space files and report plumbing (JSON, schema_version 1).

#include <filesystem>
#include <string>

#include <json.hpp>

#include "alexkit/extremality.hpp"
#include "alexkit/measure.hpp"
#include "alexkit/models.hpp"

namespace alexkit::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Library version string.
const char* version();

/// A finite double as a JSON number; +-inf and nan as strings.
json num(double v);

/// Space file document. Annotations are embedded when given.
json space_to_json(const Space& space, const models::ModelAnnotation* annotation = nullptr);

/// Parses a space document. Throws RefusalError naming the offending key.
models::Model space_from_json(const json& doc);

models::Model read_space(const std::filesystem::path& path);
void write_space(const std::filesystem::path& path, const Space& space,
                 const models::ModelAnnotation* annotation = nullptr);

json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; the same document always yields the same bytes.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& doc);

/// Report envelope: op name, resolved config, version and outputs.
json report(const std::string& op, const json& config, json outputs);

json to_json(const ValidationReport& r);
json to_json(const PackingResult& r);
json to_json(const MeasureEstimate& e);
json to_json(const DimensionEstimate& d);
json to_json(const ExtremalityReport& r);
json to_json(const models::ModelAnnotation& a);

}  // namespace alexkit::io
