#ifndef TURBOCS_CONFIG_HPP
#define TURBOCS_CONFIG_HPP

#include <map>
#include <string>

#include "turbocs/turbo.hpp"

namespace turbocs {

using KeyValueMap = std::map<std::string, std::string>;

/// Flat key=value file ('#' comments, blank lines ignored).
KeyValueMap parse_kv_file(const std::string& path);

/// Environment overrides: TURBOCS_<KEY> (key upper-cased) replaces any file
/// value for the known configuration keys.
void apply_env_overrides(KeyValueMap& kv);

/// Builds a TurboConfig for the given geometry: defaults from
/// default_hyperparams, then file/env overrides. Keys are the field names of
/// TurboConfig and HyperParams; per-level values are comma-separated lists
/// (level arrays sized J+1 ordered -1..J-1, transition arrays sized J-1).
TurboConfig make_config(const QuadTreeIndex& tree, const KeyValueMap& kv);

/// Serializes a config back to the key=value format.
std::string format_config(const TurboConfig& cfg);

}  // namespace turbocs

#endif
