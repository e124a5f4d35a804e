#include "bgreg/demons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bgreg/broken_geodesic.hpp"
#include "bgreg/field_ops.hpp"
#include "bgreg/parallel.hpp"

namespace bgreg {

void LegConfig::validate() const {
    if (iterations_per_level < 1)
        throw std::invalid_argument("LegConfig: iterations_per_level must be >= 1");
    if (pyramid_levels < 1)
        throw std::invalid_argument("LegConfig: pyramid_levels must be >= 1");
    if (sigma_fluid < 0.0 || sigma_diffusion < 0.0)
        throw std::invalid_argument("LegConfig: sigmas must be >= 0");
    if (!(force_cap > 0.0))
        throw std::invalid_argument("LegConfig: force_cap must be > 0");
    if (reg_weight < 0.0)
        throw std::invalid_argument("LegConfig: reg_weight must be >= 0");
}

namespace {

double mean_sq_residual(const ScalarImage &a, const ScalarImage &b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double r = a.data[i] - b.data[i];
        acc += r * r;
    }
    return acc / static_cast<double>(a.data.size());
}

double energy_of_warped(const ScalarImage &warped, const ScalarImage &fixed,
                        const VectorField &disp, double reg_weight) {
    double e = mean_sq_residual(warped, fixed);
    if (reg_weight > 0.0) e += reg_weight * mean_sq_gradient_norm(disp);
    return e;
}

}  // namespace

double energy(const ScalarImage &moving, const ScalarImage &fixed,
              const VectorField &v, const LegConfig &cfg) {
    if (!moving.grid.same_grid(fixed.grid) || !moving.grid.same_grid(v.grid))
        throw std::invalid_argument("energy: grids differ");
    const DisplacementTransform phi = exp_svf(v, cfg.exp_cfg);
    const ScalarImage warped = warp(moving, phi, Interp::Linear);
    return energy_of_warped(warped, fixed, phi.disp, cfg.reg_weight);
}

VectorField demons_update(const ScalarImage &moving_warped,
                          const ScalarImage &fixed, const LegConfig &cfg) {
    if (!moving_warped.grid.same_grid(fixed.grid))
        throw std::invalid_argument("demons_update: grids differ");
    const int nd = fixed.ndim();
    const VectorField gf = gradient(fixed);
    const VectorField gm = gradient(moving_warped);
    VectorField force(fixed.grid);
    const std::size_t n = fixed.data.size();
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double r = fixed.data[i] - moving_warped.data[i];
            double g[3], g2 = 0.0;
            for (int c = 0; c < nd; ++c) {
                g[c] = 0.5 * (gf.data[i * nd + c] + gm.data[i * nd + c]);
                g2 += g[c] * g[c];
            }
            const double denom = g2 + r * r;
            if (denom < 1e-9) continue;  // force stays zero
            double f[3], m2 = 0.0;
            for (int c = 0; c < nd; ++c) {
                f[c] = r * g[c] / denom;
                m2 += f[c] * f[c];
            }
            const double m = std::sqrt(m2);
            const double s = m > cfg.force_cap ? cfg.force_cap / m : 1.0;
            for (int c = 0; c < nd; ++c) force.data[i * nd + c] = f[c] * s;
        }
    });
    return gaussian_smooth(force, cfg.sigma_fluid);
}

ScalarImage downsample2(const ScalarImage &img) {
    const int nd = img.ndim();
    std::vector<int> dims(nd);
    for (int a = 0; a < nd; ++a) dims[a] = (img.dims()[a] + 1) / 2;
    std::vector<double> spacing(nd);
    for (int a = 0; a < nd; ++a) spacing[a] = img.grid.spacing[a] * 2.0;
    ScalarImage out(make_grid(dims, spacing));
    const int nx = out.nx(), ny = out.ny(), nz = out.nz();
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                double acc = 0.0;
                int cnt = 0;
                const int zmax = nd == 3 ? 2 : 1;
                for (int dz = 0; dz < zmax; ++dz)
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            // pad-by-edge for odd dims
                            const int sx = std::min(2 * x + dx, img.nx() - 1);
                            const int sy = std::min(2 * y + dy, img.ny() - 1);
                            const int sz = std::min(2 * z + dz, img.nz() - 1);
                            acc += img.at(sx, sy, sz);
                            ++cnt;
                        }
                out.at(x, y, z) = acc / cnt;
            }
    return out;
}

VectorField upsample_svf(const VectorField &v, const GridInfo &fine) {
    const int nd = v.ndim();
    VectorField out(fine);
    const int nx = fine.dims[0], ny = fine.dims[1];
    const int nz = nd == 3 ? fine.dims[2] : 1;
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                // block-average alignment: fine center maps to (c+0.5)/2-0.5
                double p[3] = {(x + 0.5) / 2.0 - 0.5, (y + 0.5) / 2.0 - 0.5,
                               (z + 0.5) / 2.0 - 0.5};
                double val[3];
                sample_vector(v, std::span<const double>(p, nd),
                              std::span<double>(val, nd));
                const std::size_t vi = out.voxel_index(x, y, z) * nd;
                for (int c = 0; c < nd; ++c) out.data[vi + c] = 2.0 * val[c];
            }
        }
    });
    return out;
}

LegResult register_leg(const ScalarImage &moving, const ScalarImage &fixed,
                       const LegConfig &cfg) {
    cfg.validate();
    if (!moving.grid.same_grid(fixed.grid))
        throw std::invalid_argument("register_leg: grids differ");

    // Build the pyramid, coarsest last; stop early if any dim would drop
    // below 4 voxels.
    std::vector<ScalarImage> mov_pyr{moving}, fix_pyr{fixed};
    for (int l = 1; l < cfg.pyramid_levels; ++l) {
        const ScalarImage &prev = mov_pyr.back();
        if (*std::min_element(prev.dims().begin(), prev.dims().end()) < 8) break;
        mov_pyr.push_back(downsample2(prev));
        fix_pyr.push_back(downsample2(fix_pyr.back()));
    }

    LegResult result;
    VectorField v(mov_pyr.back().grid);
    VectorField best_v = v;
    double best_energy = std::numeric_limits<double>::infinity();

    for (int level = static_cast<int>(mov_pyr.size()) - 1; level >= 0; --level) {
        const ScalarImage &mov = mov_pyr[level];
        const ScalarImage &fix = fix_pyr[level];
        if (!v.grid.same_grid(mov.grid)) v = upsample_svf(v, mov.grid);
        const bool finest = level == 0;

        for (int it = 0; it <= cfg.iterations_per_level; ++it) {
            const DisplacementTransform phi = exp_svf(v, cfg.exp_cfg);
            const ScalarImage warped = warp(mov, phi, Interp::Linear);
            const double e = energy_of_warped(warped, fix, phi.disp, cfg.reg_weight);
            if (!std::isfinite(e))
                throw NumericalError("register_leg: non-finite energy at level " +
                                     std::to_string(level));
            result.energy_trace.push_back(e);
            if (finest && e < best_energy) {
                best_energy = e;
                best_v = v;
            }
            if (it == cfg.iterations_per_level) break;  // final evaluation only
            const VectorField update = demons_update(warped, fix, cfg);
            v = gaussian_smooth(add(v, update), cfg.sigma_diffusion);
        }
    }

    result.svf = std::move(best_v);
    result.final_energy = best_energy;
    result.leg_length = v_norm(result.svf);
    return result;
}

}  // namespace bgreg
