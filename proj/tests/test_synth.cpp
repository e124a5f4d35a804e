#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bgreg/field_ops.hpp"
#include "bgreg/synth.hpp"
#include "support/helpers.hpp"

using namespace bgreg;
using namespace bgreg::testing;

TEST_CASE("support radius scales with the square root of the degree in 2D") {
    const GridInfo g = make_grid({128, 128});
    const double r1 = support_radius(g, 1);
    const double r4 = support_radius(g, 4);
    CHECK(r4 == doctest::Approx(2.0 * r1).epsilon(1e-12));
    // area accounting: pi r^2 == k * 0.05% of the image area
    CHECK(std::numbers::pi * r1 * r1 ==
          doctest::Approx(0.0005 * 128.0 * 128.0).epsilon(1e-12));
}

TEST_CASE("zero amplitude gives the zero field") {
    SynthSpec spec;
    spec.amplitude_scale = 0.0;
    spec.seed = 5;
    const VectorField f = generate_deformation(make_grid({96, 96}), spec);
    for (double v : f.data) CHECK(v == 0.0);
}

TEST_CASE("same seed reproduces the field bit-for-bit") {
    SynthSpec spec;
    spec.seed = 99;
    spec.degree = 4;
    const GridInfo g = make_grid({128, 128});
    const VectorField a = generate_deformation(g, spec);
    const VectorField b = generate_deformation(g, spec);
    CHECK(a.data == b.data);
    spec.seed = 100;
    const VectorField c = generate_deformation(g, spec);
    CHECK(a.data != c.data);
}

TEST_CASE("guarantee_diffeo yields a positive ground-truth jacobian") {
    for (int k : {1, 5, 10}) {
        SynthSpec spec;
        spec.degree = k;
        spec.seed = 7;
        spec.amplitude_scale = 1.0;  // aggressive, forces the rescale path at high k
        const GridInfo g = make_grid({128, 128});
        const ScalarImage base = make_synthetic_base(g);
        const SynthPair pair = make_pair(base, spec);
        const ScalarImage jac = jacobian_determinant(pair.ground_truth);
        CHECK(*std::min_element(jac.data.begin(), jac.data.end()) > 0.0);
    }
}

TEST_CASE("zero-field spec leaves moving equal to fixed") {
    SynthSpec spec;
    spec.amplitude_scale = 0.0;
    const ScalarImage base = make_synthetic_base(make_grid({64, 64}));
    const SynthPair pair = make_pair(base, spec);
    CHECK(pair.moving.data == pair.fixed.data);
}

TEST_CASE("support-area accounting stays near nominal") {
    SynthSpec spec;
    spec.n_control_points = 25;
    spec.degree = 2;
    spec.seed = 3;
    spec.guarantee_diffeo = false;
    const GridInfo g = make_grid({256, 256});
    const VectorField f = generate_deformation(g, spec);
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < f.voxel_count(); ++i)
        nonzero += f.data[i * 2] != 0.0 || f.data[i * 2 + 1] != 0.0;
    const double nominal = spec.n_control_points * spec.degree * 0.0005 *
                           static_cast<double>(g.voxel_count());
    const double measured = static_cast<double>(nonzero);
    CHECK(measured > 0.8 * nominal);  // overlaps may reduce coverage
    CHECK(measured < 1.2 * nominal);
}

TEST_CASE("unplaceable control points raise a descriptive error") {
    // narrow grid: the margin exceeds the short axis
    SynthSpec spec;
    spec.degree = 10;
    CHECK_THROWS_AS(generate_deformation(make_grid({128, 3}), spec),
                    std::invalid_argument);
}

TEST_CASE("sweep CSV has the pinned schema and is reproducible") {
    const ScalarImage base = make_synthetic_base(make_grid({48, 48}));
    DriverConfig cfg;
    cfg.leg_cfg.iterations_per_level = 5;
    cfg.max_legs = 2;
    SynthSpec spec;
    spec.n_control_points = 4;
    const auto rows = metric_vs_degree(base, {1, 2}, 2, cfg, spec);
    CHECK(rows.size() == 4);
    const std::string csv = sweep_to_csv(rows);
    CHECK(csv.rfind("seed,k,metric,final_mse,n_legs\n", 0) == 0);
    const auto rows2 = metric_vs_degree(base, {1, 2}, 2, cfg, spec);
    CHECK(csv == sweep_to_csv(rows2));
}

TEST_CASE("synthetic base image is deterministic and in range") {
    const GridInfo g = make_grid({64, 64});
    const ScalarImage a = make_synthetic_base(g, 2);
    const ScalarImage b = make_synthetic_base(g, 2);
    CHECK(a.data == b.data);
    const auto [lo, hi] = std::minmax_element(a.data.begin(), a.data.end());
    CHECK(*lo >= 0.0);
    CHECK(*hi <= 1.0);
}
