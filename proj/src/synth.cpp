#include "bgreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bgreg/field_ops.hpp"
#include "bgreg/svf_exp.hpp"

namespace bgreg {

void SynthSpec::validate() const {
    if (n_control_points < 0)
        throw std::invalid_argument("SynthSpec: n_control_points must be >= 0");
    if (degree < 1 || degree > 10)
        throw std::invalid_argument("SynthSpec: degree must be in 1..10");
    if (amplitude_scale < 0.0)
        throw std::invalid_argument("SynthSpec: amplitude_scale must be >= 0");
}

double u01(std::uint64_t raw) {
    // 53 high bits -> [0, 1); fully determined by the mt19937_64 stream
    return static_cast<double>(raw >> 11) * 0x1.0p-53;
}

double support_radius(const GridInfo &g, int degree) {
    const double volume = static_cast<double>(g.voxel_count());
    const double target = degree * 0.0005 * volume;  // k * 0.05%
    if (g.ndim() == 2) return std::sqrt(target / std::numbers::pi);
    return std::cbrt(target * 3.0 / (4.0 * std::numbers::pi));
}

namespace {

void add_bump(VectorField &field, const double *center, const double *dir,
              double amplitude, double rho) {
    const int nd = field.ndim();
    const double radius = 3.0 * rho;
    const int nx = field.nx(), ny = field.ny(), nz = field.nz();
    int lo[3] = {0, 0, 0}, hi[3] = {nx - 1, ny - 1, nz - 1};
    for (int a = 0; a < nd; ++a) {
        lo[a] = std::max(lo[a], static_cast<int>(std::floor(center[a] - radius)));
        hi[a] = std::min(hi[a], static_cast<int>(std::ceil(center[a] + radius)));
    }
    for (int z = lo[2]; z <= hi[2]; ++z)
        for (int y = lo[1]; y <= hi[1]; ++y)
            for (int x = lo[0]; x <= hi[0]; ++x) {
                const double dx = x - center[0];
                const double dy = y - center[1];
                const double dz = nd == 3 ? z - center[2] : 0.0;
                const double r2 = dx * dx + dy * dy + dz * dz;
                if (r2 > radius * radius) continue;
                const double w = amplitude * std::exp(-0.5 * r2 / (rho * rho));
                const std::size_t vi = field.voxel_index(x, y, z) * nd;
                for (int c = 0; c < nd; ++c) field.data[vi + c] += w * dir[c];
            }
}

}  // namespace

VectorField generate_deformation(const GridInfo &g, const SynthSpec &spec) {
    spec.validate();
    const int nd = g.ndim();
    const double radius = support_radius(g, spec.degree);
    const double rho = radius / 3.0;
    const double amplitude = spec.amplitude_scale * spec.degree;
    const double margin = 2.0 * radius;

    for (int a = 0; a < nd; ++a)
        if (margin > (g.dims[a] - 1) - margin)
            throw std::invalid_argument(
                "generate_deformation: control points unplaceable, support radius " +
                std::to_string(radius) + " needs margin 2R from every border");

    std::mt19937_64 rng(spec.seed);
    VectorField field(g);
    for (int j = 0; j < spec.n_control_points; ++j) {
        double center[3] = {0, 0, 0};
        for (int a = 0; a < nd; ++a) {
            const double lo = margin, hi = (g.dims[a] - 1) - margin;
            center[a] = lo + u01(rng()) * (hi - lo);
        }
        double dir[3] = {0, 0, 0};
        if (nd == 2) {
            const double ang = 2.0 * std::numbers::pi * u01(rng());
            dir[0] = std::cos(ang);
            dir[1] = std::sin(ang);
        } else {
            const double zc = 2.0 * u01(rng()) - 1.0;
            const double ang = 2.0 * std::numbers::pi * u01(rng());
            const double s = std::sqrt(std::max(0.0, 1.0 - zc * zc));
            dir[0] = s * std::cos(ang);
            dir[1] = s * std::sin(ang);
            dir[2] = zc;
        }
        add_bump(field, center, dir, amplitude, rho);
    }

    if (spec.guarantee_diffeo && amplitude > 0.0) {
        for (int attempt = 0; attempt < 20; ++attempt) {
            const ScalarImage jac = jacobian_determinant(exp_svf(field));
            const double jmin = *std::min_element(jac.data.begin(), jac.data.end());
            if (jmin > 0.0) break;
            field = scale(field, 0.7);
        }
    }
    return field;
}

SynthPair make_pair(const ScalarImage &img, const SynthSpec &spec) {
    SynthPair pair;
    pair.moving = img;
    pair.ground_truth_svf = generate_deformation(img.grid, spec);
    pair.ground_truth = exp_svf(pair.ground_truth_svf);
    pair.fixed = warp(img, pair.ground_truth, Interp::Linear);
    return pair;
}

std::vector<SweepRow> metric_vs_degree(const ScalarImage &img,
                                       const std::vector<int> &degrees,
                                       int n_seeds, const DriverConfig &cfg,
                                       const SynthSpec &base_spec) {
    std::vector<SweepRow> rows;
    for (int s = 0; s < n_seeds; ++s) {
        for (int k : degrees) {
            SynthSpec spec = base_spec;
            spec.seed = base_spec.seed + static_cast<std::uint64_t>(s);
            spec.degree = k;
            const SynthPair pair = make_pair(img, spec);
            const BrokenGeodesic g = run_broken_geodesic(pair.moving, pair.fixed, cfg);
            rows.push_back(SweepRow{spec.seed, k, path_metric(g), g.final_energy,
                                    g.n_legs()});
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow> &rows) {
    std::string out = "seed,k,metric,final_mse,n_legs\n";
    char buf[160];
    for (const SweepRow &r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%d,%.17g,%.17g,%d\n",
                      static_cast<unsigned long long>(r.seed), r.degree, r.metric,
                      r.final_mse, r.n_legs);
        out += buf;
    }
    return out;
}

ScalarImage make_synthetic_base(const GridInfo &g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScalarImage img(g);
    for (double &v : img.data) v = u01(rng());
    img = gaussian_smooth(img, 3.0);
    const auto [lo_it, hi_it] = std::minmax_element(img.data.begin(), img.data.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi > lo)
        for (double &v : img.data) v = (v - lo) / (hi - lo);
    return img;
}

}  // namespace bgreg
