// Shared test utilities: seeded smooth random fields, interior-margin error
// measurement and a small rank-correlation helper. Independent of the code
// paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "bgreg/field_ops.hpp"
#include "bgreg/image.hpp"
#include "bgreg/synth.hpp"

namespace bgreg::testing {

// Smoothed seeded noise rescaled to the requested max vector magnitude.
inline VectorField smooth_random_field(const GridInfo &g, double sigma,
                                       double target_maxnorm,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    VectorField f(g);
    for (double &v : f.data) v = 2.0 * u01(rng()) - 1.0;
    f = gaussian_smooth(f, sigma);
    const double mn = max_vector_norm(f);
    if (mn > 0.0) f = scale(f, target_maxnorm / mn);
    return f;
}

inline ScalarImage smooth_random_image(const GridInfo &g, double sigma,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ScalarImage img(g);
    for (double &v : img.data) v = u01(rng());
    return gaussian_smooth(img, sigma);
}

// Max Euclidean difference between two displacement fields over voxels at
// least `margin` voxels from every border.
inline double interior_max_diff(const VectorField &a, const VectorField &b,
                                int margin) {
    const int nd = a.ndim();
    const int nx = a.nx(), ny = a.ny(), nz = a.nz();
    const int zlo = nd == 3 ? margin : 0;
    const int zhi = nd == 3 ? nz - 1 - margin : 0;
    double best = 0.0;
    for (int z = zlo; z <= zhi; ++z)
        for (int y = margin; y <= ny - 1 - margin; ++y)
            for (int x = margin; x <= nx - 1 - margin; ++x) {
                double m2 = 0.0;
                const std::size_t vi = a.voxel_index(x, y, z) * nd;
                for (int c = 0; c < nd; ++c) {
                    const double d = a.data[vi + c] - b.data[vi + c];
                    m2 += d * d;
                }
                best = std::max(best, m2);
            }
    return std::sqrt(best);
}

// Max displacement magnitude on the interior only.
inline double interior_max_norm(const VectorField &a, int margin) {
    return interior_max_diff(a, VectorField(a.grid), margin);
}

inline std::vector<double> average_ranks(const std::vector<double> &v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * (i + j) + 1.0;  // average rank of the tie group
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double> &x, const std::vector<double> &y) {
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace bgreg::testing
