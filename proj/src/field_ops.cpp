#include "bgreg/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bgreg/parallel.hpp"

namespace bgreg {

bool all_finite(const std::vector<double> &v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

namespace {

inline int clampi(int i, int n) { return std::clamp(i, 0, n - 1); }

// Per-axis interpolation taps: clamped sample indices and weights.
struct AxisTaps {
    int idx[4];
    double w[4];
    int n;
};

AxisTaps make_taps(double t, int dim, Interp scheme) {
    AxisTaps a{};
    const double fl = std::floor(t);
    const int i0 = static_cast<int>(fl);
    const double f = t - fl;
    if (scheme == Interp::Linear) {
        a.n = 2;
        a.idx[0] = clampi(i0, dim);
        a.idx[1] = clampi(i0 + 1, dim);
        a.w[0] = 1.0 - f;
        a.w[1] = f;
    } else {
        // Catmull-Rom
        const double f2 = f * f, f3 = f2 * f;
        a.n = 4;
        a.idx[0] = clampi(i0 - 1, dim);
        a.idx[1] = clampi(i0, dim);
        a.idx[2] = clampi(i0 + 1, dim);
        a.idx[3] = clampi(i0 + 2, dim);
        a.w[0] = 0.5 * (-f3 + 2.0 * f2 - f);
        a.w[1] = 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0);
        a.w[2] = 0.5 * (-3.0 * f3 + 4.0 * f2 + f);
        a.w[3] = 0.5 * (f3 - f2);
    }
    return a;
}

AxisTaps unit_tap() {
    AxisTaps a{};
    a.n = 1;
    a.idx[0] = 0;
    a.w[0] = 1.0;
    return a;
}

}  // namespace

double interpolate(const ScalarImage &img, std::span<const double> p,
                   Interp scheme) {
    if (static_cast<int>(p.size()) != img.ndim())
        throw std::invalid_argument("interpolate: point dimensionality mismatch");
    const int nx = img.nx(), ny = img.ny(), nz = img.nz();
    const AxisTaps tx = make_taps(p[0], nx, scheme);
    const AxisTaps ty = make_taps(p[1], ny, scheme);
    const AxisTaps tz = img.ndim() == 3 ? make_taps(p[2], nz, scheme) : unit_tap();

    double acc = 0.0;
    for (int kz = 0; kz < tz.n; ++kz) {
        const std::size_t zoff = static_cast<std::size_t>(tz.idx[kz]) * ny;
        for (int ky = 0; ky < ty.n; ++ky) {
            const std::size_t yoff = (zoff + ty.idx[ky]) * nx;
            const double wyz = tz.w[kz] * ty.w[ky];
            for (int kx = 0; kx < tx.n; ++kx)
                acc += wyz * tx.w[kx] * img.data[yoff + tx.idx[kx]];
        }
    }
    return acc;
}

void sample_vector(const VectorField &f, std::span<const double> p,
                   std::span<double> out) {
    const int nd = f.ndim();
    if (static_cast<int>(p.size()) != nd || static_cast<int>(out.size()) != nd)
        throw std::invalid_argument("sample_vector: dimensionality mismatch");
    const int nx = f.nx(), ny = f.ny(), nz = f.nz();
    const AxisTaps tx = make_taps(p[0], nx, Interp::Linear);
    const AxisTaps ty = make_taps(p[1], ny, Interp::Linear);
    const AxisTaps tz = nd == 3 ? make_taps(p[2], nz, Interp::Linear) : unit_tap();

    for (int c = 0; c < nd; ++c) out[c] = 0.0;
    for (int kz = 0; kz < tz.n; ++kz) {
        const std::size_t zoff = static_cast<std::size_t>(tz.idx[kz]) * ny;
        for (int ky = 0; ky < ty.n; ++ky) {
            const std::size_t yoff = (zoff + ty.idx[ky]) * nx;
            const double wyz = tz.w[kz] * ty.w[ky];
            for (int kx = 0; kx < tx.n; ++kx) {
                const double w = wyz * tx.w[kx];
                const std::size_t base = (yoff + tx.idx[kx]) * nd;
                for (int c = 0; c < nd; ++c) out[c] += w * f.data[base + c];
            }
        }
    }
}

ScalarImage warp(const ScalarImage &img, const DisplacementTransform &t,
                 Interp scheme) {
    if (!img.grid.same_grid(t.disp.grid))
        throw std::invalid_argument("warp: image and transform grids differ");
    const int nd = img.ndim();
    const int nx = img.nx(), ny = img.ny(), nz = img.nz();
    ScalarImage out(img.grid);
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                const std::size_t vi = t.disp.voxel_index(x, y, z) * nd;
                double p[3] = {x + t.disp.data[vi], y + t.disp.data[vi + 1], 0.0};
                if (nd == 3) p[2] = z + t.disp.data[vi + 2];
                out.at(x, y, z) = interpolate(img, std::span<const double>(p, nd), scheme);
            }
        }
    });
    return out;
}

DisplacementTransform compose(const DisplacementTransform &t2,
                              const DisplacementTransform &t1) {
    if (!t1.disp.grid.same_grid(t2.disp.grid))
        throw std::invalid_argument("compose: transform grids differ");
    const int nd = t1.ndim();
    const int nx = t1.disp.nx(), ny = t1.disp.ny(), nz = t1.disp.nz();
    DisplacementTransform out{VectorField(t1.disp.grid), TransformProvenance::Composed};
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                const std::size_t vi = t1.disp.voxel_index(x, y, z) * nd;
                double p[3] = {x + t1.disp.data[vi], y + t1.disp.data[vi + 1], 0.0};
                if (nd == 3) p[2] = z + t1.disp.data[vi + 2];
                double d2[3];
                sample_vector(t2.disp, std::span<const double>(p, nd),
                              std::span<double>(d2, nd));
                for (int c = 0; c < nd; ++c)
                    out.disp.data[vi + c] = t1.disp.data[vi + c] + d2[c];
            }
        }
    });
    return out;
}

namespace {

// Central difference of component `comp` of d along axis `axis` at (x,y,z),
// one-sided at borders, in voxel units.
double ddiff(const VectorField &d, int x, int y, int z, int comp, int axis) {
    int c[3] = {x, y, z};
    const int n = d.dims()[axis];
    const int lo = std::max(0, c[axis] - 1);
    const int hi = std::min(n - 1, c[axis] + 1);
    if (hi == lo) return 0.0;
    int ch[3] = {x, y, z}, cl[3] = {x, y, z};
    ch[axis] = hi;
    cl[axis] = lo;
    return (d.at(ch[0], ch[1], ch[2], comp) - d.at(cl[0], cl[1], cl[2], comp)) /
           static_cast<double>(hi - lo);
}

}  // namespace

ScalarImage jacobian_determinant(const DisplacementTransform &t) {
    const VectorField &d = t.disp;
    const int nd = d.ndim();
    const int nx = d.nx(), ny = d.ny(), nz = d.nz();
    const auto &sp = d.grid.spacing;
    ScalarImage out(d.grid);
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                double J[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j)
                        J[i][j] = (i == j ? 1.0 : 0.0) +
                                  ddiff(d, x, y, z, i, j) * sp[i] / sp[j];
                double det;
                if (nd == 2) {
                    det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
                } else {
                    det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                          J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                          J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
                }
                out.at(x, y, z) = det;
            }
        }
    });
    return out;
}

VectorField gradient(const ScalarImage &img) {
    const int nd = img.ndim();
    const int nx = img.nx(), ny = img.ny(), nz = img.nz();
    const auto &sp = img.grid.spacing;
    VectorField out(img.grid);
    parallel_for(static_cast<std::size_t>(nz) * ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const int z = static_cast<int>(row / ny);
            const int y = static_cast<int>(row % ny);
            for (int x = 0; x < nx; ++x) {
                int c[3] = {x, y, z};
                for (int axis = 0; axis < nd; ++axis) {
                    const int n = img.dims()[axis];
                    int lo = std::max(0, c[axis] - 1);
                    int hi = std::min(n - 1, c[axis] + 1);
                    double g = 0.0;
                    if (hi > lo) {
                        int ch[3] = {x, y, z}, cl[3] = {x, y, z};
                        ch[axis] = hi;
                        cl[axis] = lo;
                        g = (img.at(ch[0], ch[1], ch[2]) - img.at(cl[0], cl[1], cl[2])) /
                            (static_cast<double>(hi - lo) * sp[axis]);
                    }
                    out.at(x, y, z, axis) = g;
                }
            }
        }
    });
    return out;
}

namespace {

// Smooth one axis of an interleaved buffer in place, renormalizing the
// truncated kernel over in-range taps.
void smooth_axis(std::vector<double> &data, int nx, int ny, int nz, int ncomp,
                 int axis, double sigma) {
    if (sigma <= 0.0) return;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(radius + 1);
    for (int i = 0; i <= radius; ++i)
        kernel[i] = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));

    const int n_axis = axis == 0 ? nx : axis == 1 ? ny : nz;
    if (n_axis == 1) return;
    const std::size_t stride_c = 1;
    const std::size_t stride_x = static_cast<std::size_t>(ncomp);
    const std::size_t stride_y = stride_x * nx;
    const std::size_t stride_z = stride_y * ny;
    const std::size_t stride =
        axis == 0 ? stride_x : axis == 1 ? stride_y : stride_z;

    // Lines orthogonal to the smoothing axis.
    const int la = axis == 0 ? ny : nx;
    const int lb = axis == 2 ? ny : nz;
    const std::size_t sa = axis == 0 ? stride_y : stride_x;
    const std::size_t sb = axis == 2 ? stride_y : stride_z;

    std::vector<double> src(data);  // read from the copy, write into data
    parallel_for(static_cast<std::size_t>(la) * lb, [&](std::size_t beg, std::size_t end) {
        for (std::size_t line = beg; line < end; ++line) {
            const std::size_t ia = line % la;
            const std::size_t ib = line / la;
            const std::size_t base = ia * sa + ib * sb;
            for (int c = 0; c < ncomp; ++c) {
                for (int i = 0; i < n_axis; ++i) {
                    const int jlo = std::max(0, i - radius);
                    const int jhi = std::min(n_axis - 1, i + radius);
                    double acc = 0.0, wsum = 0.0;
                    for (int j = jlo; j <= jhi; ++j) {
                        const double w = kernel[std::abs(j - i)];
                        acc += w * src[base + static_cast<std::size_t>(j) * stride +
                                       c * stride_c];
                        wsum += w;
                    }
                    data[base + static_cast<std::size_t>(i) * stride + c * stride_c] =
                        acc / wsum;
                }
            }
        }
    });
}

void smooth_buffer(std::vector<double> &data, const GridInfo &g, int ncomp,
                   std::span<const double> sigma) {
    if (static_cast<int>(sigma.size()) != g.ndim())
        throw std::invalid_argument("gaussian_smooth: sigma/dims size mismatch");
    for (double s : sigma)
        if (s < 0.0) throw std::invalid_argument("gaussian_smooth: negative sigma");
    const int nx = g.dims[0], ny = g.dims[1];
    const int nz = g.ndim() == 3 ? g.dims[2] : 1;
    for (int axis = 0; axis < g.ndim(); ++axis)
        smooth_axis(data, nx, ny, nz, ncomp, axis, sigma[axis]);
}

}  // namespace

ScalarImage gaussian_smooth(const ScalarImage &img, std::span<const double> sigma) {
    ScalarImage out = img;
    smooth_buffer(out.data, out.grid, 1, sigma);
    return out;
}

VectorField gaussian_smooth(const VectorField &f, std::span<const double> sigma) {
    VectorField out = f;
    smooth_buffer(out.data, out.grid, out.ndim(), sigma);
    return out;
}

ScalarImage gaussian_smooth(const ScalarImage &img, double sigma) {
    std::vector<double> s(img.ndim(), sigma);
    return gaussian_smooth(img, std::span<const double>(s));
}

VectorField gaussian_smooth(const VectorField &f, double sigma) {
    std::vector<double> s(f.ndim(), sigma);
    return gaussian_smooth(f, std::span<const double>(s));
}

double max_vector_norm(const VectorField &f) {
    const int nd = f.ndim();
    double best = 0.0;
    for (std::size_t v = 0; v < f.voxel_count(); ++v) {
        double m2 = 0.0;
        for (int c = 0; c < nd; ++c) {
            const double x = f.data[v * nd + c];
            m2 += x * x;
        }
        best = std::max(best, m2);
    }
    return std::sqrt(best);
}

VectorField add(const VectorField &a, const VectorField &b) {
    if (!a.grid.same_grid(b.grid))
        throw std::invalid_argument("add: field grids differ");
    VectorField out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

VectorField scale(const VectorField &f, double s) {
    VectorField out = f;
    for (double &x : out.data) x *= s;
    return out;
}

double mean_sq_gradient_norm(const VectorField &d) {
    const int nd = d.ndim();
    const int nx = d.nx(), ny = d.ny(), nz = d.nz();
    const auto &sp = d.grid.spacing;
    double acc = 0.0;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                for (int i = 0; i < nd; ++i)
                    for (int j = 0; j < nd; ++j) {
                        const double g = ddiff(d, x, y, z, i, j) / sp[j];
                        acc += g * g;
                    }
    return acc / static_cast<double>(d.voxel_count());
}

}  // namespace bgreg
