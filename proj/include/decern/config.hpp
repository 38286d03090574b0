#pragma once

// Run configuration files.
//
// Grammar (one statement per line):
//
//   # comment                 ignored, also after a value
//   [section]                 prefixes following keys with "section."
//   key = value               value runs to end of line; optional "quotes"
//
// Keys are dotted ("decern.R"); lists are comma separated ("seeds = 0,1,2").
// Overrides use the same "key=value" form with fully dotted keys.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "decern/harness.hpp"

namespace decern {

using ConfigMap = std::map<std::string, std::string>;

// Every key the resolver understands, in echo order.
const std::vector<std::string>& known_config_keys();

ConfigMap parse_config_text(std::string_view text);

// Reads a config file. A JSON file with a "config" object (a report.json)
// is accepted too, so a run can be repeated from its own echo.
ConfigMap load_config_file(const std::filesystem::path& path);

// "key=value"; throws on a missing '=' or an unknown key.
void apply_override(ConfigMap& cfg, std::string_view assignment);

// Fills defaults for absent keys; throws on unknown keys or bad values.
RunConfig resolve_config(const ConfigMap& cfg);

// Canonical key/value form of a resolved config, including defaults.
// The output directory is left out so reports do not depend on where they
// are written; otherwise resolve_config(echo_config(c)) reproduces c.
ConfigMap echo_config(const RunConfig& cfg);

std::string format_double(double v);

}  // namespace decern
