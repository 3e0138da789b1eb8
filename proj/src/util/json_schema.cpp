#include "genbench/util/json_schema.hpp"

#include <fmt/format.h>

#include "genbench/util/error.hpp"

namespace genbench::util {
namespace {

using nlohmann::json;

bool has_type(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    if (type == "number") return value.is_number();
    if (type == "integer") {
        if (value.is_number_integer()) return true;
        if (value.is_number_float()) {
            const double d = value.get<double>();
            return d == static_cast<double>(static_cast<long long>(d));
        }
        return false;
    }
    return false;
}

std::string child(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void check(const json& schema, const json& value, const std::string& path) {
        if (schema.is_boolean()) {
            if (!schema.get<bool>()) fail(path, "not allowed");
            return;
        }
        if (schema.contains("$ref")) {
            check(resolve(schema.at("$ref").get<std::string>()), value, path);
            return;
        }
        if (schema.contains("oneOf")) {
            std::size_t matches = 0;
            for (const auto& alt : schema.at("oneOf")) {
                Validator sub(root_);
                sub.check(alt, value, path);
                if (sub.out.empty()) ++matches;
            }
            if (matches != 1) {
                fail(path, matches == 0 ? "matches none of the allowed forms" : "matches more than one allowed form");
                return;
            }
        }
        if (schema.contains("type")) {
            const auto& t = schema.at("type");
            bool ok = false;
            std::string names;
            if (t.is_array()) {
                for (const auto& one : t) {
                    ok = ok || has_type(value, one.get<std::string>());
                    names += (names.empty() ? "" : " or ") + one.get<std::string>();
                }
            } else {
                ok = has_type(value, t.get<std::string>());
                names = t.get<std::string>();
            }
            if (!ok) {
                fail(path, fmt::format("expected {}, got {}", names, value.type_name()));
                return;
            }
        }
        if (schema.contains("enum")) {
            bool found = false;
            for (const auto& allowed : schema.at("enum")) {
                found = found || allowed == value;
            }
            if (!found) fail(path, fmt::format("value {} not in {}", value.dump(), schema.at("enum").dump()));
        }
        if (value.is_number()) {
            const double v = value.get<double>();
            if (schema.contains("minimum") && v < schema.at("minimum").get<double>()) {
                fail(path, fmt::format("must be >= {}", schema.at("minimum").dump()));
            }
            if (schema.contains("exclusiveMinimum") && v <= schema.at("exclusiveMinimum").get<double>()) {
                fail(path, fmt::format("must be > {}", schema.at("exclusiveMinimum").dump()));
            }
        }
        if (value.is_string() && schema.contains("minLength") &&
            value.get<std::string>().size() < schema.at("minLength").get<std::size_t>()) {
            fail(path, "string too short");
        }
        if (value.is_array()) {
            if (schema.contains("minItems") && value.size() < schema.at("minItems").get<std::size_t>()) {
                fail(path, fmt::format("needs at least {} item(s)", schema.at("minItems").dump()));
            }
            if (schema.contains("items")) {
                for (std::size_t i = 0; i < value.size(); ++i) {
                    check(schema.at("items"), value[i], fmt::format("{}[{}]", path, i));
                }
            }
        }
        if (value.is_object()) {
            if (schema.contains("required")) {
                for (const auto& key : schema.at("required")) {
                    if (!value.contains(key.get<std::string>())) {
                        fail(child(path, key.get<std::string>()), "is required");
                    }
                }
            }
            const json empty = json::object();
            const auto& props = schema.contains("properties") ? schema.at("properties") : empty;
            for (const auto& [key, sub] : value.items()) {
                if (props.contains(key)) {
                    check(props.at(key), sub, child(path, key));
                } else if (schema.contains("additionalProperties")) {
                    const auto& extra = schema.at("additionalProperties");
                    if (extra.is_boolean() && !extra.get<bool>()) {
                        fail(child(path, key), "unknown field");
                    } else if (extra.is_object()) {
                        check(extra, sub, child(path, key));
                    }
                }
            }
        }
    }

    std::vector<SchemaViolation> out;

private:
    const json& resolve(const std::string& ref) {
        const std::string prefix = "#/";
        if (ref.rfind(prefix, 0) != 0) {
            throw ConfigError(fmt::format("schema: unsupported $ref '{}'", ref));
        }
        try {
            return root_.at(json::json_pointer(ref.substr(1)));
        } catch (const json::exception&) {
            throw ConfigError(fmt::format("schema: dangling $ref '{}'", ref));
        }
    }

    void fail(const std::string& path, std::string message) {
        out.push_back({path.empty() ? "<root>" : path, std::move(message)});
    }

    const json& root_;
};

}  // namespace

std::vector<SchemaViolation> schema_violations(const json& schema, const json& value) {
    Validator v(schema);
    v.check(schema, value, "");
    return std::move(v.out);
}

void validate_schema(const json& schema, const json& value, const std::string& what) {
    const auto violations = schema_violations(schema, value);
    if (violations.empty()) {
        return;
    }
    std::string msg = fmt::format("{} is invalid:", what);
    for (const auto& v : violations) {
        msg += fmt::format("\n  {}: {}", v.path, v.message);
    }
    throw ConfigError(msg);
}

}  // namespace genbench::util
