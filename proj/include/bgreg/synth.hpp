// Synthetic controlled-deformation generator: random control-point local
// warps with a tunable degree-of-deformation parameter, plus deterministic
// test images. Randomness comes from mt19937_64 with hand-rolled uniforms so
// outputs are bit-identical across platforms.

#pragma once

#include <cstdint>
#include <vector>

#include "bgreg/broken_geodesic.hpp"
#include "bgreg/image.hpp"

namespace bgreg {

struct SynthSpec {
    int n_control_points = 25;
    int degree = 1;  // k in 1..10; affected area per point = k * 0.05% of image
    std::uint64_t seed = 0;
    double amplitude_scale = 0.4;  // displacement (voxels) per unit degree
    bool guarantee_diffeo = true;

    void validate() const;
};

// Truncation radius of one control point's support for degree k on the given
// grid (area/volume proportional to k).
double support_radius(const GridInfo &g, int degree);

// Sum of compactly supported Gaussian bumps at random control points,
// returned as an SVF to be exponentiated. Control points stay at least twice
// the support radius away from borders. With guarantee_diffeo the field is
// rescaled until exp of it has strictly positive Jacobian determinant.
VectorField generate_deformation(const GridInfo &g, const SynthSpec &spec);

struct SynthPair {
    ScalarImage moving;  // the input image
    ScalarImage fixed;   // input warped by exp of the ground-truth SVF
    VectorField ground_truth_svf;
    DisplacementTransform ground_truth;  // exp(ground_truth_svf)
};

SynthPair make_pair(const ScalarImage &img, const SynthSpec &spec);

struct SweepRow {
    std::uint64_t seed = 0;
    int degree = 0;
    double metric = 0.0;
    double final_mse = 0.0;
    int n_legs = 0;
};

// For each (seed, k) build a pair, run the driver, and record the metric.
std::vector<SweepRow> metric_vs_degree(const ScalarImage &img,
                                       const std::vector<int> &degrees,
                                       int n_seeds, const DriverConfig &cfg,
                                       const SynthSpec &base_spec = {});

// CSV with header "seed,k,metric,final_mse,n_legs"; deterministic formatting.
std::string sweep_to_csv(const std::vector<SweepRow> &rows);

// Smooth deterministic test image in [0, 1]: smoothed seeded noise with a
// bright blob structure, good enough to give demons something to latch onto.
ScalarImage make_synthetic_base(const GridInfo &g, std::uint64_t seed = 1);

// Portable uniform double in [0, 1) from a raw 64-bit generator output.
double u01(std::uint64_t raw);

}  // namespace bgreg
