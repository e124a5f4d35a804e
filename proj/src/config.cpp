#include "bgreg/config.hpp"

#include <fstream>

namespace bgreg {

using nlohmann::json;

nlohmann::json to_json(const LegConfig &cfg) {
    return json{{"iterations_per_level", cfg.iterations_per_level},
                {"pyramid_levels", cfg.pyramid_levels},
                {"sigma_fluid", cfg.sigma_fluid},
                {"sigma_diffusion", cfg.sigma_diffusion},
                {"force_cap", cfg.force_cap},
                {"reg_weight", cfg.reg_weight},
                {"min_scalings", cfg.exp_cfg.min_scalings},
                {"max_step_norm", cfg.exp_cfg.max_step_norm}};
}

LegConfig leg_config_from_json(const nlohmann::json &j) {
    LegConfig cfg;
    cfg.iterations_per_level = j.value("iterations_per_level", cfg.iterations_per_level);
    cfg.pyramid_levels = j.value("pyramid_levels", cfg.pyramid_levels);
    cfg.sigma_fluid = j.value("sigma_fluid", cfg.sigma_fluid);
    cfg.sigma_diffusion = j.value("sigma_diffusion", cfg.sigma_diffusion);
    cfg.force_cap = j.value("force_cap", cfg.force_cap);
    cfg.reg_weight = j.value("reg_weight", cfg.reg_weight);
    cfg.exp_cfg.min_scalings = j.value("min_scalings", cfg.exp_cfg.min_scalings);
    cfg.exp_cfg.max_step_norm = j.value("max_step_norm", cfg.exp_cfg.max_step_norm);
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const DriverConfig &cfg) {
    json j = to_json(cfg.leg_cfg);
    j["max_legs"] = cfg.max_legs;
    j["min_energy_decrease"] = cfg.min_energy_decrease;
    j["patience"] = cfg.patience;
    return j;
}

DriverConfig driver_config_from_json(const nlohmann::json &j) {
    DriverConfig cfg;
    cfg.leg_cfg = leg_config_from_json(j);
    cfg.max_legs = j.value("max_legs", cfg.max_legs);
    cfg.min_energy_decrease = j.value("min_energy_decrease", cfg.min_energy_decrease);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.validate();
    return cfg;
}

nlohmann::json to_json(const SynthSpec &spec) {
    return json{{"n_control_points", spec.n_control_points},
                {"degree", spec.degree},
                {"seed", spec.seed},
                {"amplitude_scale", spec.amplitude_scale},
                {"guarantee_diffeo", spec.guarantee_diffeo}};
}

SynthSpec synth_spec_from_json(const nlohmann::json &j) {
    SynthSpec spec;
    spec.n_control_points = j.value("n_control_points", spec.n_control_points);
    spec.degree = j.value("degree", spec.degree);
    spec.seed = j.value("seed", spec.seed);
    spec.amplitude_scale = j.value("amplitude_scale", spec.amplitude_scale);
    spec.guarantee_diffeo = j.value("guarantee_diffeo", spec.guarantee_diffeo);
    spec.validate();
    return spec;
}

nlohmann::json load_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw IoError("JSON parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string &path, const nlohmann::json &j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace bgreg
