#include "bgreg/broken_geodesic.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "bgreg/field_ops.hpp"
#include "bgreg/svf_exp.hpp"

namespace bgreg {

void DriverConfig::validate() const {
    if (max_legs < 1) throw std::invalid_argument("DriverConfig: max_legs must be >= 1");
    if (min_energy_decrease < 0.0)
        throw std::invalid_argument("DriverConfig: min_energy_decrease must be >= 0");
    if (patience < 1) throw std::invalid_argument("DriverConfig: patience must be >= 1");
    leg_cfg.validate();
}

double v_norm(const VectorField &v) {
    const int nd = v.ndim();
    double acc = 0.0;
    for (std::size_t i = 0; i < v.voxel_count(); ++i) {
        double m2 = 0.0;
        for (int c = 0; c < nd; ++c) {
            const double x = v.data[i * nd + c];
            m2 += x * x;
        }
        acc += m2;
    }
    return std::sqrt(acc / static_cast<double>(v.voxel_count()));
}

double path_metric(const BrokenGeodesic &g) {
    double total = 0.0;
    for (double l : g.leg_lengths) total += l;
    return total;
}

namespace {

double plain_mse(const ScalarImage &a, const ScalarImage &b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double r = a.data[i] - b.data[i];
        acc += r * r;
    }
    return acc / static_cast<double>(a.data.size());
}

}  // namespace

BrokenGeodesic run_broken_geodesic(const ScalarImage &moving,
                                   const ScalarImage &fixed,
                                   const DriverConfig &cfg) {
    cfg.validate();
    if (!moving.grid.same_grid(fixed.grid))
        throw std::invalid_argument("run_broken_geodesic: grids differ");

    BrokenGeodesic g;
    g.composed = identity_transform(moving.grid);

    ScalarImage current = moving;
    double e_min = plain_mse(current, fixed);
    if (!std::isfinite(e_min))
        throw NumericalError("run_broken_geodesic: non-finite initial energy");
    g.initial_energy = e_min;
    g.final_energy = e_min;
    if (e_min == 0.0) return g;  // already matched; the gate cannot fire

    int rejected_in_a_row = 0;
    while (g.n_legs() < cfg.max_legs && rejected_in_a_row < cfg.patience) {
        const auto t0 = std::chrono::steady_clock::now();
        LegResult leg = register_leg(current, fixed, cfg.leg_cfg);
        const DisplacementTransform phi = exp_svf(leg.svf, cfg.leg_cfg.exp_cfg);
        ScalarImage temp = warp(current, phi, Interp::Linear);
        const double e = plain_mse(temp, fixed);
        if (!std::isfinite(e))
            throw NumericalError("run_broken_geodesic: non-finite leg energy");

        if (e < e_min * (1.0 - cfg.min_energy_decrease)) {
            g.legs.push_back(leg.svf);
            g.leg_lengths.push_back(v_norm(leg.svf));
            g.total_length += g.leg_lengths.back();
            g.composed = compose(g.composed, phi);
            g.energy_history.push_back(e);
            g.leg_wall_times_s.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                    .count());
            current = std::move(temp);
            e_min = e;
            g.final_energy = e;
            rejected_in_a_row = 0;
        } else {
            ++rejected_in_a_row;
        }
    }
    return g;
}

ForwardBackwardResult forward_backward(const ScalarImage &moving,
                                       const ScalarImage &fixed,
                                       const DriverConfig &cfg) {
    ForwardBackwardResult r;
    r.forward = run_broken_geodesic(moving, fixed, cfg);
    r.backward = run_broken_geodesic(fixed, moving, cfg);

    const ScalarImage fwd_then_bwd =
        warp(warp(moving, r.forward.composed), r.backward.composed);
    const ScalarImage bwd_then_fwd =
        warp(warp(fixed, r.backward.composed), r.forward.composed);
    r.roundtrip_mse_moving = plain_mse(fwd_then_bwd, moving);
    r.roundtrip_mse_fixed = plain_mse(bwd_then_fwd, fixed);
    r.roundtrip_max_disp =
        max_vector_norm(compose(r.forward.composed, r.backward.composed).disp);
    return r;
}

}  // namespace bgreg
