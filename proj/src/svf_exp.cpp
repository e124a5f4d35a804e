#include "bgreg/svf_exp.hpp"

#include <cmath>
#include <stdexcept>

#include "bgreg/parallel.hpp"

namespace bgreg {

int choose_scalings(double max_norm, const ExpConfig &cfg) {
    int k = std::max(0, cfg.min_scalings);
    if (max_norm > cfg.max_step_norm) {
        const int needed =
            static_cast<int>(std::ceil(std::log2(max_norm / cfg.max_step_norm)));
        k = std::max(k, needed);
    }
    return k;
}

DisplacementTransform exp_svf(const VectorField &v, const ExpConfig &cfg) {
    if (!all_finite(v.data))
        throw std::invalid_argument("exp_svf: non-finite velocity field");
    const int k = choose_scalings(max_vector_norm(v), cfg);
    DisplacementTransform d{scale(v, std::ldexp(1.0, -k)),
                            TransformProvenance::ExpOfSvf};
    for (int i = 0; i < k; ++i) {
        d = compose(d, d);
        d.provenance = TransformProvenance::ExpOfSvf;
    }
    return d;
}

DisplacementTransform exp_oracle(const VectorField &v, int steps) {
    if (steps < 1) throw std::invalid_argument("exp_oracle: steps must be >= 1");
    const int nd = v.ndim();
    const int nx = v.nx(), ny = v.ny(), nz = v.nz();
    const double h = 1.0 / static_cast<double>(steps);
    DisplacementTransform out{VectorField(v.grid), TransformProvenance::ExpOfSvf};
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                double p[3] = {static_cast<double>(x), static_cast<double>(y),
                               static_cast<double>(z)};
                double vel[3];
                for (int s = 0; s < steps; ++s) {
                    sample_vector(v, std::span<const double>(p, nd),
                                  std::span<double>(vel, nd));
                    for (int c = 0; c < nd; ++c) p[c] += h * vel[c];
                }
                const std::size_t vi = out.disp.voxel_index(x, y, z) * nd;
                out.disp.data[vi] = p[0] - x;
                out.disp.data[vi + 1] = p[1] - y;
                if (nd == 3) out.disp.data[vi + 2] = p[2] - z;
            }
        }
    });
    return out;
}

DisplacementTransform inverse_transform(const VectorField &v,
                                        const ExpConfig &cfg) {
    return exp_svf(scale(v, -1.0), cfg);
}

}  // namespace bgreg
