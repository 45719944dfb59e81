#pragma once

#include <string>

#include <json.hpp>

namespace mri {

/// The complete default run configuration: every tunable of the pipeline
/// with its shipped value. Reports embed the fully-merged document so no
/// setting is ever implicit.
nlohmann::json default_config();

/// Recursively overlays `user` onto `base`. Every user key must already
/// exist in the defaults (unknown keys are rejected with their JSON path)
/// and must keep the default's value kind (number/string/bool/object).
nlohmann::json merge_config(const nlohmann::json& base, const nlohmann::json& user,
                            const std::string& path = "");

/// default_config() overlaid with the JSON document at `path`; an empty
/// path returns the defaults unchanged.
nlohmann::json load_config(const std::string& path);

}  // namespace mri
