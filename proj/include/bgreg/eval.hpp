// Quantitative assessment: MSE, Dice via nearest-neighbor label transfer,
// Jacobian statistics and roundtrip residuals.

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "bgreg/broken_geodesic.hpp"
#include "bgreg/image.hpp"

namespace bgreg {

struct LabelImage {
    GridInfo grid;
    std::vector<int> data;  // non-negative integer labels

    LabelImage() = default;
    explicit LabelImage(GridInfo g, int fill = 0)
        : grid(std::move(g)), data(grid.voxel_count(), fill) {}

    int ndim() const { return grid.ndim(); }
    std::size_t size() const { return data.size(); }
};

struct EvalReport {
    double mse_before = 0.0;
    double mse_after = 0.0;
    std::map<int, double> dice_per_label;
    double jac_min = 0.0;
    double jac_mean = 0.0;
    double jac_negative_fraction = 0.0;
    double roundtrip_max_disp = 0.0;  // voxels; 0 when no backward geodesic given
    double metric = 0.0;              // broken-geodesic path length
};

double mse(const ScalarImage &a, const ScalarImage &b);

// Nearest-neighbor pullback transfer: out(x) = labels(round(x + d(x))),
// clamped at edges. Never invents a label value.
LabelImage transfer_labels(const LabelImage &labels, const DisplacementTransform &t);

// 2|A&B| / (|A|+|B|); 1 when both sets are empty, 0 when exactly one is.
double dice(const LabelImage &a, const LabelImage &b, int label);

// Labels from intensity bands: label i for thresholds[i-1] <= v < thresholds[i].
LabelImage threshold_labels(const ScalarImage &img,
                            const std::vector<double> &thresholds);

// Fills every report field from the forward geodesic; dice entries only when
// both label inputs are present, roundtrip only when a backward geodesic is
// supplied.
EvalReport evaluate_pair(const ScalarImage &moving, const ScalarImage &fixed,
                         const std::optional<LabelImage> &labels_moving,
                         const std::optional<LabelImage> &labels_fixed_truth,
                         const BrokenGeodesic &g,
                         const BrokenGeodesic *backward = nullptr);

}  // namespace bgreg
