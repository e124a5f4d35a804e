#include "bgreg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "bgreg/field_ops.hpp"
#include "bgreg/svf_exp.hpp"

namespace bgreg {

double mse(const ScalarImage &a, const ScalarImage &b) {
    if (!a.grid.same_grid(b.grid)) throw std::invalid_argument("mse: grids differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double r = a.data[i] - b.data[i];
        acc += r * r;
    }
    return acc / static_cast<double>(a.data.size());
}

LabelImage transfer_labels(const LabelImage &labels, const DisplacementTransform &t) {
    if (!labels.grid.same_grid(t.disp.grid))
        throw std::invalid_argument("transfer_labels: grids differ");
    const int nd = labels.ndim();
    const int nx = labels.grid.dims[0], ny = labels.grid.dims[1];
    const int nz = nd == 3 ? labels.grid.dims[2] : 1;
    LabelImage out(labels.grid);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const std::size_t v = t.disp.voxel_index(x, y, z);
                const std::size_t vi = v * nd;
                const int sx = std::clamp(
                    static_cast<int>(std::lround(x + t.disp.data[vi])), 0, nx - 1);
                const int sy = std::clamp(
                    static_cast<int>(std::lround(y + t.disp.data[vi + 1])), 0, ny - 1);
                int sz = 0;
                if (nd == 3)
                    sz = std::clamp(
                        static_cast<int>(std::lround(z + t.disp.data[vi + 2])), 0,
                        nz - 1);
                out.data[v] =
                    labels.data[t.disp.voxel_index(sx, sy, sz)];
            }
    return out;
}

double dice(const LabelImage &a, const LabelImage &b, int label) {
    if (!a.grid.same_grid(b.grid)) throw std::invalid_argument("dice: grids differ");
    std::size_t na = 0, nb = 0, nab = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const bool ia = a.data[i] == label;
        const bool ib = b.data[i] == label;
        na += ia;
        nb += ib;
        nab += ia && ib;
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(nab) / static_cast<double>(na + nb);
}

LabelImage threshold_labels(const ScalarImage &img,
                            const std::vector<double> &thresholds) {
    LabelImage out(img.grid);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        int label = 0;
        for (double t : thresholds)
            if (img.data[i] >= t) ++label;
        out.data[i] = label;
    }
    return out;
}

EvalReport evaluate_pair(const ScalarImage &moving, const ScalarImage &fixed,
                         const std::optional<LabelImage> &labels_moving,
                         const std::optional<LabelImage> &labels_fixed_truth,
                         const BrokenGeodesic &g, const BrokenGeodesic *backward) {
    EvalReport rep;
    rep.mse_before = mse(moving, fixed);
    rep.mse_after = mse(warp(moving, g.composed), fixed);
    rep.metric = path_metric(g);

    const ScalarImage jac = jacobian_determinant(g.composed);
    rep.jac_min = *std::min_element(jac.data.begin(), jac.data.end());
    double acc = 0.0;
    std::size_t neg = 0;
    for (double v : jac.data) {
        acc += v;
        neg += v < 0.0;
    }
    rep.jac_mean = acc / static_cast<double>(jac.data.size());
    rep.jac_negative_fraction =
        static_cast<double>(neg) / static_cast<double>(jac.data.size());

    if (labels_moving && labels_fixed_truth) {
        const LabelImage transferred = transfer_labels(*labels_moving, g.composed);
        std::set<int> labels(labels_fixed_truth->data.begin(),
                             labels_fixed_truth->data.end());
        labels.insert(transferred.data.begin(), transferred.data.end());
        for (int l : labels)
            rep.dice_per_label[l] = dice(transferred, *labels_fixed_truth, l);
    }

    if (backward)
        rep.roundtrip_max_disp =
            max_vector_norm(compose(g.composed, backward->composed).disp);
    return rep;
}

}  // namespace bgreg
