#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "winsim/analysis.hpp"
#include "winsim/errors.hpp"

namespace winsim {

/// Configuration problems, all of them, not just the first.
class ConfigErrors : public ConfigError {
public:
  explicit ConfigErrors(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
  std::vector<std::string> errors_;
};

/// Parses a YAML experiment description. Physical quantities carry units
/// ("20 GHz", "17 ps/(nm km)"); unknown keys are rejected. Throws
/// ConfigErrors listing every problem found.
ExperimentConfig parse_config_text(std::string_view text, std::string_view source = "<config>");
ExperimentConfig parse_config(const std::string& path);

/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// YAML text of a built-in preset; throws ConfigError for unknown names.
std::string_view preset_text(std::string_view name);
ExperimentConfig load_preset(std::string_view name);

}  // namespace winsim
