// Group exponential of a stationary velocity field by scaling-and-squaring,
// its inverse via the negated field, and a brute-force Euler flow integrator
// used as an independent check in tests.

#pragma once

#include "bgreg/field_ops.hpp"
#include "bgreg/image.hpp"

namespace bgreg {

struct ExpConfig {
    // Floor on the number of squaring steps.
    int min_scalings = 2;
    // Target max per-voxel displacement magnitude (voxels) after scaling.
    double max_step_norm = 0.5;
};

// Number of squarings K chosen so that maxnorm(v)/2^K <= cfg.max_step_norm
// and K >= cfg.min_scalings.
int choose_scalings(double max_norm, const ExpConfig &cfg);

// exp(v) by scaling-and-squaring: d = v/2^K, then K self-compositions with
// linear interpolation. exp_svf(0) is exactly the identity.
DisplacementTransform exp_svf(const VectorField &v, const ExpConfig &cfg = {});

// Explicit Euler integration of dx/dt = v(x) with `steps` steps and linear
// interpolation of v. Slow; intended as an oracle.
DisplacementTransform exp_oracle(const VectorField &v, int steps);

// exp(-v); the SVF structure gives the inverse for free.
DisplacementTransform inverse_transform(const VectorField &v,
                                        const ExpConfig &cfg = {});

}  // namespace bgreg
