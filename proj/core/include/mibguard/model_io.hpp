#pragma once

#include <memory>
#include <string>

#include "mibguard/classifiers.hpp"

namespace mibguard {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON document:
// {format_version, kind, schema, classes, normalization, params, structure}.
std::string model_to_json(const Model& model);

// Rejects unknown format versions; deserialized models predict identically.
std::unique_ptr<Model> model_from_json(const std::string& text);

}  // namespace mibguard
