#pragma once

#include <map>
#include <string>

#include "l96da/experiment.hpp"

namespace l96da {

/// Parse a flat `key = value` file with `[section]` headers into
/// "section.key" -> value. Lines starting with '#' and blank lines are
/// skipped. Throws ConfigError on malformed lines.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Apply "section.key" settings to an ExperimentConfig. Unknown keys or
/// unparseable values throw ConfigError. Recognized sections: harness,
/// integrator, observations, localization, anamorphosis.
void apply_config(ExperimentConfig& cfg,
                  const std::map<std::string, std::string>& kv);

}  // namespace l96da
