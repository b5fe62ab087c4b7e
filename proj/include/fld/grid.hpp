#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fld {

/**
 * Uniform Cartesian tensor grid on a box, d in {1, 2}.
 *
 * Cells are stored row-major with axis 0 varying fastest:
 * flat index = i + n0 * j. The box boundary is a no-flux wall.
 */
class Grid {
public:
    static constexpr int kMaxDim = 2;

    Grid(int dim, std::array<std::size_t, kMaxDim> cells, std::array<double, kMaxDim> origin,
         std::array<double, kMaxDim> spacing);

    int dim() const { return dim_; }
    std::size_t cells(int axis) const { return cells_[axis]; }
    double origin(int axis) const { return origin_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double min_spacing() const;

    std::size_t size() const;
    double cell_volume() const;
    double total_measure() const { return cell_volume() * static_cast<double>(size()); }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return i + cells_[0] * j; }
    // Multi-index of a flat cell index.
    std::array<std::size_t, kMaxDim> multi_index(std::size_t flat) const;

    double center(int axis, std::size_t k) const {
        return origin_[axis] + (static_cast<double>(k) + 0.5) * spacing_[axis];
    }
    // |x|^2 at the center of a flat cell index.
    double center_norm_sq(std::size_t flat) const;

    // Faces normal to `axis`, including the two boundary layers.
    std::size_t face_count(int axis) const;

    bool operator==(const Grid& other) const = default;

private:
    int dim_;
    std::array<std::size_t, kMaxDim> cells_;
    std::array<double, kMaxDim> origin_;
    std::array<double, kMaxDim> spacing_;
};

/// Centered box [-L, L]^d tiled by n cells per axis.
Grid make_grid(int dim, double extent, std::size_t cells_per_axis);
Grid make_grid(int dim, std::array<double, Grid::kMaxDim> extent,
               std::array<std::size_t, Grid::kMaxDim> cells_per_axis);

/// Cell-centered scalar sample on a grid. Values are required to be finite;
/// density nonnegativity is checked by the solvers via require_density().
class Field {
public:
    explicit Field(Grid grid);
    Field(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    bool all_finite() const;
    bool all_nonnegative() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

// Throws NumericalFailure unless the field is finite and >= 0 everywhere.
void require_density(const Field& field, const char* where);

/**
 * Quantities living on the faces normal to one axis.
 *
 * Face (k, j) on axis 0 separates cells k-1 and k along x; the layers
 * k = 0 and k = n are boundary faces and always carry zero.
 * For d = 2 each face also carries the tangential gradient component.
 */
struct FaceData {
    int axis = 0;
    std::size_t faces_along = 0;  // n_axis + 1
    std::size_t layer_size = 1;   // faces per layer along the axis (n0 for axis 1)
    std::vector<double> normal;
    std::vector<double> tangential;  // empty in 1D

    // Position of a face along its normal axis, in [0, faces_along).
    std::size_t layer(std::size_t face) const { return axis == 0 ? face % faces_along : face / layer_size; }
    bool is_boundary(std::size_t face) const;
};

/// Discrete gradient on faces, one FaceData per axis.
std::vector<FaceData> face_gradient(const Field& field);

/// Face flux divergence, normal components only.
Field divergence(const Grid& grid, std::span<const FaceData> flux);

/// Cell-centered gradient: central differences inside, one-sided at the wall.
std::array<std::vector<double>, Grid::kMaxDim> cell_gradient(const Field& field);

struct Weight {
    enum class Kind { One, AbsPower, OnePlusSquare };
    Kind kind = Kind::One;
    double power = 0.0;

    static Weight one() { return {}; }
    static Weight abs_power(double p) { return {Kind::AbsPower, p}; }
    static Weight one_plus_square() { return {Kind::OnePlusSquare, 2.0}; }
};

/// Midpoint rule: sum of w(x_cell) * rho_cell * volume.
double integrate(const Field& field, Weight weight = Weight::one());

/// Midpoint rule for the integral of |rho|^p.
double integrate_power(const Field& field, double p);

// Snapshot text format: header `d n1 [n2] h1 [h2] origin...`, then one value
// per line in flat index order, written with round-trip precision.
void write_snapshot(std::ostream& out, const Field& field);
Field read_snapshot(std::istream& in);
void save_snapshot(const std::string& path, const Field& field);
Field load_snapshot(const std::string& path);

}  // namespace fld
