#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "chirp/chirp_metric.hpp"

namespace chirp {

/// Flat TOML subset: `key = value` lines, `[section]` headers, `#` comments.
/// Values may be integers, floats, booleans or double-quoted strings. Keys are
/// returned as "section.key". Enough for sampling config files; not a general
/// TOML implementation.
std::map<std::string, std::string> parse_toml_lite(const std::string& text);
std::map<std::string, std::string> load_toml_lite(const std::string& path);

/// sampling.toml -> SamplingConfig. Recognized keys: scheme ("random" |
/// "reward-shaped"), n_s, n_t, seed, and an [mcce] section with population,
/// elite_fraction, iterations. `repeats`, when present, is returned through
/// the out-parameter for matrix commands.
SamplingConfig sampling_config_from_toml(const std::string& path, int* repeats_out = nullptr);

} // namespace chirp
