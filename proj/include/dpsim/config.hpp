#ifndef DPSIM_CONFIG_HPP
#define DPSIM_CONFIG_HPP

#include "dpsim/engine.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dpsim {

/// Sets one field by name, e.g. ("path_length", "3"). Throws
/// ValidationError for unknown keys or values of the wrong type.
void apply_setting(sim::SimConfig& cfg, std::string_view key, std::string_view value);

/// Splits "key=value" and applies it.
void apply_assignment(sim::SimConfig& cfg, std::string_view assignment);

/// Plain-text defaults: one key=value per line, '#' starts a comment.
void load_config_file(sim::SimConfig& cfg, const std::filesystem::path& path);

/// Recognised keys, for usage text.
std::vector<std::string> setting_keys();

} // namespace dpsim

#endif
