// One registration leg: estimate a single stationary velocity field
// registering a moving image to a fixed image with symmetric demons forces
// and fluid/diffusion Gaussian regularization, over a multi-resolution
// pyramid.

#pragma once

#include <vector>

#include "bgreg/image.hpp"
#include "bgreg/svf_exp.hpp"

namespace bgreg {

struct LegConfig {
    int iterations_per_level = 50;
    int pyramid_levels = 3;       // downsampling factor 2 per level
    double sigma_fluid = 2.0;     // smooths the update force (voxels)
    double sigma_diffusion = 1.0; // smooths the accumulated field (voxels)
    double force_cap = 2.0;       // max update magnitude per iteration (voxels)
    double reg_weight = 0.0;      // lambda on the Reg term of the energy
    ExpConfig exp_cfg;

    void validate() const;
};

struct LegResult {
    VectorField svf;                   // the converged field
    std::vector<double> energy_trace;  // one value per iteration, all levels
    double final_energy = 0.0;         // best energy seen at the finest level
    double leg_length = 0.0;           // RMS norm of svf
};

// Mean squared residual of the warped moving image against fixed, plus
// reg_weight times the mean squared Frobenius norm of the spatial derivative
// of the displacement of exp(v).
double energy(const ScalarImage &moving, const ScalarImage &fixed,
              const VectorField &v, const LegConfig &cfg);

// Symmetric normalized demons force, magnitude-capped, then smoothed by
// sigma_fluid. f = r*g / (|g|^2 + r^2) with r the residual and g the mean of
// the fixed and warped-moving gradients; near-zero denominators give zero.
VectorField demons_update(const ScalarImage &moving_warped,
                          const ScalarImage &fixed, const LegConfig &cfg);

// Multi-resolution demons solve for one leg. The field is zero-initialized
// at the coarsest level, upsampled between levels, and the best-energy field
// seen at the finest level is returned.
LegResult register_leg(const ScalarImage &moving, const ScalarImage &fixed,
                       const LegConfig &cfg);

// 2x block-average downsample (edge-padded for odd dims).
ScalarImage downsample2(const ScalarImage &img);

// Linear upsample of an SVF to the given grid with component scaling x2.
VectorField upsample_svf(const VectorField &v, const GridInfo &fine);

}  // namespace bgreg
