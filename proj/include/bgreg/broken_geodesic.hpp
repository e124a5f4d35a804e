// Outer driver: run registration legs sequentially, accept a leg only if it
// strictly lowers the energy against the fixed image, and accumulate the
// composed transform and the broken-geodesic path-length metric.

#pragma once

#include <vector>

#include "bgreg/demons.hpp"
#include "bgreg/image.hpp"

namespace bgreg {

struct BrokenGeodesic {
    std::vector<VectorField> legs;    // accepted SVFs v_1..v_N, in order
    std::vector<double> leg_lengths;  // per-leg RMS norm
    double total_length = 0.0;        // sum of leg_lengths
    DisplacementTransform composed;   // exp(v_1) o ... o exp(v_N), pullback order
    std::vector<double> energy_history;  // E_min after each accepted leg
    std::vector<double> leg_wall_times_s;  // per accepted leg
    double initial_energy = 0.0;         // energy of the unregistered pair
    double final_energy = 0.0;           // E_min at termination

    int n_legs() const { return static_cast<int>(legs.size()); }
};

struct DriverConfig {
    int max_legs = 10;
    double min_energy_decrease = 1e-3;  // relative improvement to accept a leg
    int patience = 2;  // consecutive rejected legs before stopping
    LegConfig leg_cfg;

    void validate() const;
};

// Discretized L2 norm: sqrt(mean over voxels of |v(x)|^2), voxel units.
double v_norm(const VectorField &v);

// Sum of per-leg norms; equals g.total_length.
double path_metric(const BrokenGeodesic &g);

// Sequential-leg driver. Each leg re-registers the current warped image to
// the fixed image from scratch; a leg is accepted when its energy beats the
// best seen by at least the relative threshold.
BrokenGeodesic run_broken_geodesic(const ScalarImage &moving,
                                   const ScalarImage &fixed,
                                   const DriverConfig &cfg);

struct ForwardBackwardResult {
    BrokenGeodesic forward;   // moving -> fixed
    BrokenGeodesic backward;  // fixed -> moving
    double roundtrip_mse_moving = 0.0;  // warp(warp(moving,fwd),bwd) vs moving
    double roundtrip_mse_fixed = 0.0;   // warp(warp(fixed,bwd),fwd) vs fixed
    double roundtrip_max_disp = 0.0;    // maxnorm of the composed roundtrip
};

// Runs the driver independently in both directions. The two path metrics
// need not agree; the metric is asymmetric in general.
ForwardBackwardResult forward_backward(const ScalarImage &moving,
                                       const ScalarImage &fixed,
                                       const DriverConfig &cfg);

}  // namespace bgreg
