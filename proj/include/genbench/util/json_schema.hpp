#pragma once

// Validator for the subset of JSON Schema the engine's config files use:
// type (string or list), required, properties, additionalProperties (bool or
// schema), items, enum, minimum, exclusiveMinimum, minItems, minLength, oneOf
// and local $ref ("#/definitions/<name>").

#include <string>
#include <vector>

#include <json.hpp>

namespace genbench::util {

struct SchemaViolation {
    std::string path;  ///< e.g. "models[0].adapter"
    std::string message;
};

std::vector<SchemaViolation> schema_violations(const nlohmann::json& schema, const nlohmann::json& value);

/// Throws ConfigError naming every violation with its field path.
void validate_schema(const nlohmann::json& schema, const nlohmann::json& value, const std::string& what);

}  // namespace genbench::util
