#ifndef PCMC_PRESETS_HPP
#define PCMC_PRESETS_HPP

#include <string>
#include <vector>

#include "pcmc/config.hpp"

namespace pcmc {

struct Preset {
    std::string name;
    std::string description;
    RunConfig config;
};

/// Named cavity and band-run setups, one per published experiment.
const std::vector<Preset>& presets();

/// Throws ConfigError for unknown names.
const RunConfig& preset_config(const std::string& name);

} // namespace pcmc

#endif
