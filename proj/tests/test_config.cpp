#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bgreg/config.hpp"

using namespace bgreg;
using nlohmann::json;

TEST_CASE("LegConfig roundtrips through JSON with the pinned key names") {
    LegConfig cfg;
    cfg.iterations_per_level = 17;
    cfg.sigma_fluid = 1.25;
    cfg.exp_cfg.max_step_norm = 0.4;
    const json j = to_json(cfg);
    for (const char *key :
         {"iterations_per_level", "pyramid_levels", "sigma_fluid", "sigma_diffusion",
          "force_cap", "reg_weight", "min_scalings", "max_step_norm"})
        CHECK(j.contains(key));
    const LegConfig back = leg_config_from_json(j);
    CHECK(back.iterations_per_level == 17);
    CHECK(back.sigma_fluid == 1.25);
    CHECK(back.exp_cfg.max_step_norm == 0.4);
}

TEST_CASE("DriverConfig JSON carries driver and leg keys flat") {
    DriverConfig cfg;
    cfg.max_legs = 4;
    cfg.patience = 3;
    const json j = to_json(cfg);
    CHECK(j.contains("max_legs"));
    CHECK(j.contains("sigma_fluid"));
    const DriverConfig back = driver_config_from_json(j);
    CHECK(back.max_legs == 4);
    CHECK(back.patience == 3);
}

TEST_CASE("invalid configs are rejected on load") {
    json j = to_json(LegConfig{});
    j["force_cap"] = 0.0;
    CHECK_THROWS_AS(leg_config_from_json(j), std::invalid_argument);
}

TEST_CASE("SynthSpec JSON roundtrip") {
    SynthSpec spec;
    spec.degree = 6;
    spec.seed = 42;
    spec.guarantee_diffeo = false;
    const SynthSpec back = synth_spec_from_json(to_json(spec));
    CHECK(back.degree == 6);
    CHECK(back.seed == 42);
    CHECK_FALSE(back.guarantee_diffeo);
}
