#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace findhccs {

/// Parses TOML text into the same tree shape a JSON config would give.
nlohmann::json parse_toml(std::string_view text, std::string_view source = "<toml>");

/// Loads a declarative config; ".toml" files are TOML, everything else JSON.
/// Throws ContractError on syntax errors and IoError when unreadable.
nlohmann::json load_config_file(const std::string& path);

}  // namespace findhccs
