// JSON (de)serialization of solver and synthesis configs. Leg keys are flat:
// iterations_per_level, pyramid_levels, sigma_fluid, sigma_diffusion,
// force_cap, reg_weight, min_scalings, max_step_norm. Driver configs add
// max_legs, min_energy_decrease, patience on top of the same flat keys.

#pragma once

#include <string>

#include <json.hpp>

#include "bgreg/broken_geodesic.hpp"
#include "bgreg/demons.hpp"
#include "bgreg/synth.hpp"

namespace bgreg {

nlohmann::json to_json(const LegConfig &cfg);
LegConfig leg_config_from_json(const nlohmann::json &j);

nlohmann::json to_json(const DriverConfig &cfg);
DriverConfig driver_config_from_json(const nlohmann::json &j);

nlohmann::json to_json(const SynthSpec &spec);
SynthSpec synth_spec_from_json(const nlohmann::json &j);

nlohmann::json load_json_file(const std::string &path);
void save_json_file(const std::string &path, const nlohmann::json &j);

}  // namespace bgreg
