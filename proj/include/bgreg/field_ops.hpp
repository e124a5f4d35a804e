// Interpolation, warping, composition, gradient, Jacobian-determinant and
// Gaussian-smoothing primitives.
//
// Boundary policy: clamp-to-edge for interpolation and warping; truncated
// kernels are renormalized over in-range taps for Gaussian smoothing.

#pragma once

#include <span>

#include "bgreg/image.hpp"

namespace bgreg {

enum class Interp { Linear, Cubic };

// Sample img at a continuous point p given in voxel coordinates.
// Cubic is Catmull-Rom (interpolating, C1). Out-of-range points clamp to
// the nearest edge sample.
double interpolate(const ScalarImage &img, std::span<const double> p,
                   Interp scheme = Interp::Linear);

// Linear sample of a vector field at a continuous voxel coordinate.
// Writes ndim components into out.
void sample_vector(const VectorField &f, std::span<const double> p,
                   std::span<double> out);

// Pullback warp: out(x) = img(x + d(x)).
ScalarImage warp(const ScalarImage &img, const DisplacementTransform &t,
                 Interp scheme = Interp::Linear);

// Pullback composition: result applies t1 first, then t2, i.e.
// d(x) = d1(x) + d2(x + d1(x)) with d2 sampled linearly.
// warp(img, compose(t2, t1)) ~= warp(warp(img, t2), t1).
DisplacementTransform compose(const DisplacementTransform &t2,
                              const DisplacementTransform &t1);

// Per-voxel det of dphi/dx with phi = id + d. Central differences in the
// interior, one-sided at borders, spacing-aware.
ScalarImage jacobian_determinant(const DisplacementTransform &t);

// Spacing-aware central-difference gradient, one-sided at borders.
VectorField gradient(const ScalarImage &img);

// Separable Gaussian convolution per component; kernel truncated at radius
// ceil(3*sigma) and renormalized over in-range taps. sigma = 0 on an axis is
// a no-op for that axis.
ScalarImage gaussian_smooth(const ScalarImage &img, std::span<const double> sigma);
VectorField gaussian_smooth(const VectorField &f, std::span<const double> sigma);
ScalarImage gaussian_smooth(const ScalarImage &img, double sigma);
VectorField gaussian_smooth(const VectorField &f, double sigma);

// Max over voxels of the Euclidean vector magnitude.
double max_vector_norm(const VectorField &f);

// a + b, componentwise.
VectorField add(const VectorField &a, const VectorField &b);

// f scaled by s.
VectorField scale(const VectorField &f, double s);

// Mean over voxels of the squared Frobenius norm of the displacement's
// spatial derivative (central differences, spacing-aware).
double mean_sq_gradient_norm(const VectorField &d);

}  // namespace bgreg
