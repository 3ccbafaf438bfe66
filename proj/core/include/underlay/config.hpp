#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "underlay/model.hpp"

namespace underlay {

// Raised on malformed config text: unknown or duplicate keys, bad numbers,
// a "dB" suffix on a key that is not power-like.  The message carries the
// offending line number.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parses the flat "section.key = value" format.  Lines starting with '#'
// and blank lines are skipped.  Every scenario field has a key; keys not
// present keep the field's default.  Power-like values (powers, noise,
// SINR thresholds) accept a "dB" suffix and are converted to linear scale,
// so the parsed Scenario never carries dB values.
Scenario parse_scenario(std::string_view text);

// Reads the file and parses it.  Throws std::system_error category errors
// wrapped in ConfigError for unreadable paths.
Scenario load_scenario(const std::string& path);

// Serializes a scenario back to config text with one "key = value" line per
// field in a fixed order, using shortest round-trip number formatting.  The
// output re-parses to a bitwise-identical scenario, which makes it usable
// as a canonical form for hashing and run manifests.
std::string canonical_config(const Scenario& scenario);

// FNV-1a over the canonical form, hex-encoded.  Stable across runs.
std::string scenario_hash(const Scenario& scenario);

}  // namespace underlay
