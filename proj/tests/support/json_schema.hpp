// Minimal JSON-Schema checker covering the subset used by the shipped
// report schema: type (single or list), required, properties,
// additionalProperties (boolean form), items, enum, minimum, minItems.
#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace schema_check {

using nlohmann::json;

inline bool type_matches(const std::string& type, const json& value) {
    if (type == "object") {
        return value.is_object();
    }
    if (type == "array") {
        return value.is_array();
    }
    if (type == "string") {
        return value.is_string();
    }
    if (type == "integer") {
        return value.is_number_integer() || value.is_number_unsigned();
    }
    if (type == "number") {
        return value.is_number();
    }
    if (type == "boolean") {
        return value.is_boolean();
    }
    if (type == "null") {
        return value.is_null();
    }
    return false;
}

// Returns an empty list when the instance conforms; otherwise one message
// per violation, prefixed by a JSON-pointer-ish path.
inline void validate(const json& schema, const json& value,
                     const std::string& path,
                     std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const auto& type = schema.at("type");
        bool ok = false;
        if (type.is_array()) {
            for (const auto& t : type) {
                ok = ok || type_matches(t.get<std::string>(), value);
            }
        } else {
            ok = type_matches(type.get<std::string>(), value);
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch, expected " +
                             type.dump());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& allowed : schema.at("enum")) {
            found = found || allowed == value;
        }
        if (!found) {
            errors.push_back(path + ": value not in enum");
        }
    }
    if (schema.contains("minimum") && value.is_number()) {
        if (value.get<double>() < schema.at("minimum").get<double>()) {
            errors.push_back(path + ": below minimum");
        }
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!value.contains(key.get<std::string>())) {
                    errors.push_back(path + ": missing required property '" +
                                     key.get<std::string>() + "'");
                }
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items()) {
                if (value.contains(key)) {
                    validate(sub, value.at(key), path + "/" + key, errors);
                }
            }
        }
        if (schema.contains("additionalProperties") &&
            schema.at("additionalProperties").is_boolean() &&
            !schema.at("additionalProperties").get<bool>()) {
            for (const auto& [key, sub] : value.items()) {
                (void)sub;
                if (!schema.contains("properties") ||
                    !schema.at("properties").contains(key)) {
                    errors.push_back(path + ": unexpected property '" + key +
                                     "'");
                }
            }
        }
    }
    if (value.is_array()) {
        if (schema.contains("minItems") &&
            value.size() < schema.at("minItems").get<std::size_t>()) {
            errors.push_back(path + ": fewer than minItems entries");
        }
        if (schema.contains("items")) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                validate(schema.at("items"), value.at(i),
                         path + "/" + std::to_string(i), errors);
            }
        }
    }
}

inline std::vector<std::string> validate(const json& schema,
                                         const json& value) {
    std::vector<std::string> errors;
    validate(schema, value, "", errors);
    return errors;
}

} // namespace schema_check
