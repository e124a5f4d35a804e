// Grid-based scalar and vector field containers.
//
// Data layout is row-major with the x axis fastest. Vector components are
// interleaved per voxel and expressed in voxel units; spacing only enters
// gradients and Jacobians.

#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgreg {

// Shared grid metadata for 2D or 3D fields.
struct GridInfo {
    std::vector<int> dims;        // per-axis voxel counts, x first
    std::vector<double> spacing;  // physical voxel size per axis

    int ndim() const { return static_cast<int>(dims.size()); }

    std::size_t voxel_count() const {
        std::size_t n = 1;
        for (int d : dims) n *= static_cast<std::size_t>(d);
        return n;
    }

    bool same_grid(const GridInfo &o) const {
        return dims == o.dims && spacing == o.spacing;
    }
};

inline GridInfo make_grid(std::vector<int> dims, std::vector<double> spacing = {}) {
    if (dims.size() != 2 && dims.size() != 3)
        throw std::invalid_argument("grid must be 2D or 3D");
    if (spacing.empty()) spacing.assign(dims.size(), 1.0);
    if (spacing.size() != dims.size())
        throw std::invalid_argument("spacing/dims size mismatch");
    for (int d : dims)
        if (d <= 0) throw std::invalid_argument("dims must be positive");
    for (double s : spacing)
        if (!(s > 0.0)) throw std::invalid_argument("spacing must be positive");
    return GridInfo{std::move(dims), std::move(spacing)};
}

// Scalar intensity image on a regular grid.
struct ScalarImage {
    GridInfo grid;
    std::vector<double> data;  // size == voxel_count()

    ScalarImage() = default;
    explicit ScalarImage(GridInfo g, double fill = 0.0)
        : grid(std::move(g)), data(grid.voxel_count(), fill) {}

    int ndim() const { return grid.ndim(); }
    const std::vector<int> &dims() const { return grid.dims; }
    std::size_t size() const { return data.size(); }

    int nx() const { return grid.dims[0]; }
    int ny() const { return grid.dims[1]; }
    int nz() const { return ndim() == 3 ? grid.dims[2] : 1; }

    std::size_t index(int x, int y, int z = 0) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx()) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(ny()) * static_cast<std::size_t>(z));
    }

    double &at(int x, int y, int z = 0) { return data[index(x, y, z)]; }
    double at(int x, int y, int z = 0) const { return data[index(x, y, z)]; }
};

// Dense per-voxel vector field; one component per axis, voxel units.
struct VectorField {
    GridInfo grid;
    std::vector<double> data;  // size == voxel_count() * ndim, interleaved

    VectorField() = default;
    explicit VectorField(GridInfo g, double fill = 0.0)
        : grid(std::move(g)), data(grid.voxel_count() * grid.ndim(), fill) {}

    int ndim() const { return grid.ndim(); }
    const std::vector<int> &dims() const { return grid.dims; }
    std::size_t voxel_count() const { return grid.voxel_count(); }

    int nx() const { return grid.dims[0]; }
    int ny() const { return grid.dims[1]; }
    int nz() const { return ndim() == 3 ? grid.dims[2] : 1; }

    std::size_t voxel_index(int x, int y, int z = 0) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(nx()) *
                   (static_cast<std::size_t>(y) +
                    static_cast<std::size_t>(ny()) * static_cast<std::size_t>(z));
    }

    double &at(int x, int y, int z, int comp) {
        return data[voxel_index(x, y, z) * ndim() + comp];
    }
    double at(int x, int y, int z, int comp) const {
        return data[voxel_index(x, y, z) * ndim() + comp];
    }
};

enum class TransformProvenance { Identity, ExpOfSvf, Composed };

// A deformation phi stored as displacement d with phi(x) = x + d(x).
struct DisplacementTransform {
    VectorField disp;
    TransformProvenance provenance = TransformProvenance::Identity;

    int ndim() const { return disp.ndim(); }
    const GridInfo &grid() const { return disp.grid; }
};

inline DisplacementTransform identity_transform(const GridInfo &g) {
    return DisplacementTransform{VectorField(g, 0.0), TransformProvenance::Identity};
}

// Thrown when a file or config cannot be parsed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an optimization produces non-finite values.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool all_finite(const std::vector<double> &v);

}  // namespace bgreg
