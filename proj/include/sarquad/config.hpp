#pragma once

// Flat `key = value` mission config files.
//
// One assignment per line; `#` starts a comment; blank lines are ignored.
// Keys are dotted paths (`pid.roll.kp`, `target.3.x`). `detector = <preset>`
// is applied before any `detector.*` field regardless of line order. Lists
// (`boxes.*`) are comma separated.

#include "sarquad/mission.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sarquad {

/// Strict parse onto the defaults, then MissionConfig::validate(). Throws
/// ConfigError carrying the key and, where known, line and column.
MissionConfig parse_config(std::string_view text);

/// Sets one key as if it had appeared in the file. Does not validate.
void apply_override(MissionConfig& config, std::string_view key, std::string_view value);

/// Every documented key with its resolved value, in a stable order. Feeding
/// the output back through parse_config reproduces the config.
std::vector<std::pair<std::string, std::string>> echo_config(const MissionConfig& config);

/// All fixed keys (targets excluded) for help text and suggestions.
std::vector<std::string> known_keys();

}  // namespace sarquad
