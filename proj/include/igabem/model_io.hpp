#pragma once

#include "igabem/analysis.hpp"

#include <string>

namespace igabem {

/// Current model file format version.
inline constexpr int kModelVersion = 1;

/// Parse and validate a JSON model; errors are ValidationError with the offending path.
Model parse_model(const std::string& path);
Model parse_model_string(const std::string& text, const std::string& source = "<string>");

/// Canonical JSON text of a model (parse(serialize(m)) reproduces m exactly).
std::string serialize_model(const Model& m);
void save_model(const Model& m, const std::string& path);

}  // namespace igabem
