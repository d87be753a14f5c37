#pragma once

#include "vprobe/sweep.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace vprobe {

using Json = nlohmann::ordered_json;

// Raised for malformed configuration documents; the message names the key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Json to_json(const SweepSpec& spec);

// Overlays `doc` on `base`. Every key must be known. "axis" and "series"
// replace the base entries as a whole; an axis may give "values" or
// "range": {"start", "stop", "count"}.
SweepSpec apply_config(const SweepSpec& base, const Json& doc);

// Preset (from the argument, else the document's "preset" key, else a
// single-point Dicke default) with the document applied on top.
SweepSpec resolve_config(const Json& doc, const std::optional<std::string>& preset);

Json load_json_file(const std::string& path);

// Spec echo plus provenance: version, timestamp, timing, truncation used.
Json sidecar_json(const SweepResult& result, const std::string& command);

}  // namespace vprobe
