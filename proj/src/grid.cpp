#include "fld/grid.hpp"

#include "fld/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fld {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidDimension: return "invalid-dimension";
        case ErrorKind::InvalidExtent: return "invalid-extent";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::CflViolation: return "cfl-violation";
        case ErrorKind::NumericalFailure: return "numerical-failure";
        case ErrorKind::PicardDivergence: return "picard-divergence";
        case ErrorKind::SupportMismatch: return "support-mismatch";
        case ErrorKind::GridMismatch: return "grid-mismatch";
        case ErrorKind::SpecGridMismatch: return "spec-grid-mismatch";
        case ErrorKind::ParseError: return "parse-error";
        case ErrorKind::ValidationError: return "validation-error";
        case ErrorKind::Io: return "io-error";
    }
    return "unknown";
}

Grid::Grid(int dim, std::array<std::size_t, kMaxDim> cells, std::array<double, kMaxDim> origin,
           std::array<double, kMaxDim> spacing)
    : dim_(dim), cells_(cells), origin_(origin), spacing_(spacing) {
    if (dim < 1 || dim > kMaxDim) {
        throw Error(ErrorKind::InvalidDimension, fmt::format("grid dimension {} not in {{1, 2}}", dim));
    }
    for (int a = 0; a < dim; ++a) {
        if (cells_[a] < 3) {
            throw Error(ErrorKind::InvalidExtent, fmt::format("axis {} needs at least 3 cells", a));
        }
        if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]) || !std::isfinite(origin_[a])) {
            throw Error(ErrorKind::InvalidExtent, fmt::format("axis {} spacing must be positive", a));
        }
    }
    // Unused axes are normalized so that equality and indexing stay trivial.
    for (int a = dim; a < kMaxDim; ++a) {
        cells_[a] = 1;
        origin_[a] = 0.0;
        spacing_[a] = 1.0;
    }
}

double Grid::min_spacing() const {
    double h = spacing_[0];
    for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
    return h;
}

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= cells_[a];
    return n;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[a];
    return v;
}

std::array<std::size_t, Grid::kMaxDim> Grid::multi_index(std::size_t flat) const {
    return {flat % cells_[0], flat / cells_[0]};
}

double Grid::center_norm_sq(std::size_t flat) const {
    const auto idx = multi_index(flat);
    double r2 = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double x = center(a, idx[a]);
        r2 += x * x;
    }
    return r2;
}

std::size_t Grid::face_count(int axis) const {
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= (a == axis) ? cells_[a] + 1 : cells_[a];
    return n;
}

Grid make_grid(int dim, double extent, std::size_t cells_per_axis) {
    return make_grid(dim, {extent, extent}, {cells_per_axis, cells_per_axis});
}

Grid make_grid(int dim, std::array<double, Grid::kMaxDim> extent,
               std::array<std::size_t, Grid::kMaxDim> cells_per_axis) {
    if (dim < 1 || dim > Grid::kMaxDim) {
        throw Error(ErrorKind::InvalidDimension, fmt::format("grid dimension {} not in {{1, 2}}", dim));
    }
    std::array<double, Grid::kMaxDim> origin{};
    std::array<double, Grid::kMaxDim> spacing{1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        if (!(extent[a] > 0.0) || !std::isfinite(extent[a])) {
            throw Error(ErrorKind::InvalidExtent, fmt::format("extent on axis {} must be positive", a));
        }
        if (cells_per_axis[a] < 3) {
            throw Error(ErrorKind::InvalidExtent, fmt::format("axis {} needs at least 3 cells", a));
        }
        origin[a] = -extent[a];
        spacing[a] = 2.0 * extent[a] / static_cast<double>(cells_per_axis[a]);
    }
    return Grid(dim, cells_per_axis, origin, spacing);
}

Field::Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorKind::GridMismatch,
                    fmt::format("field has {} values, grid has {} cells", values_.size(), grid_.size()));
    }
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Field::all_nonnegative() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
}

void require_density(const Field& field, const char* where) {
    const auto values = field.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) {
            throw Error(ErrorKind::NumericalFailure, fmt::format("{}: non-finite value in cell {}", where, k));
        }
        if (values[k] < 0.0) {
            throw Error(ErrorKind::NumericalFailure,
                        fmt::format("{}: negative density {} in cell {}", where, values[k], k));
        }
    }
}

bool FaceData::is_boundary(std::size_t face) const {
    const std::size_t k = layer(face);
    return k == 0 || k + 1 == faces_along;
}

namespace {

// Per-axis cell-centered difference; one-sided on the first/last cell so that
// affine data is reproduced exactly everywhere.
std::vector<double> axis_cell_difference(const Field& field, int axis) {
    const Grid& g = field.grid();
    const std::size_t n0 = g.cells(0);
    const std::size_t n1 = g.cells(1);
    const std::size_t n = g.cells(axis);
    const std::size_t stride = axis == 0 ? 1 : n0;
    const double h = g.spacing(axis);
    std::vector<double> out(g.size());
    for (std::size_t j = 0; j < n1; ++j) {
        for (std::size_t i = 0; i < n0; ++i) {
            const std::size_t c = g.index(i, j);
            const std::size_t k = axis == 0 ? i : j;
            if (k == 0) {
                out[c] = (field[c + stride] - field[c]) / h;
            } else if (k + 1 == n) {
                out[c] = (field[c] - field[c - stride]) / h;
            } else {
                out[c] = (field[c + stride] - field[c - stride]) / (2.0 * h);
            }
        }
    }
    return out;
}

}  // namespace

std::array<std::vector<double>, Grid::kMaxDim> cell_gradient(const Field& field) {
    std::array<std::vector<double>, Grid::kMaxDim> grad;
    for (int a = 0; a < field.grid().dim(); ++a) grad[a] = axis_cell_difference(field, a);
    return grad;
}

std::vector<FaceData> face_gradient(const Field& field) {
    const Grid& g = field.grid();
    const int d = g.dim();
    const std::size_t n0 = g.cells(0);
    const std::size_t n1 = g.cells(1);

    std::vector<FaceData> out;
    out.reserve(d);

    std::array<std::vector<double>, Grid::kMaxDim> centered;
    if (d == 2) centered = cell_gradient(field);

    for (int axis = 0; axis < d; ++axis) {
        FaceData fd;
        fd.axis = axis;
        fd.faces_along = g.cells(axis) + 1;
        fd.layer_size = axis == 0 ? 1 : n0;
        fd.normal.assign(g.face_count(axis), 0.0);
        if (d == 2) fd.tangential.assign(g.face_count(axis), 0.0);
        const double h = g.spacing(axis);
        const int other = 1 - axis;

        if (axis == 0) {
            for (std::size_t j = 0; j < n1; ++j) {
                for (std::size_t k = 1; k < n0; ++k) {
                    const std::size_t f = k + (n0 + 1) * j;
                    const std::size_t left = g.index(k - 1, j);
                    const std::size_t right = g.index(k, j);
                    fd.normal[f] = (field[right] - field[left]) / h;
                    if (d == 2) fd.tangential[f] = 0.5 * (centered[other][left] + centered[other][right]);
                }
            }
        } else {
            for (std::size_t k = 1; k < n1; ++k) {
                for (std::size_t i = 0; i < n0; ++i) {
                    const std::size_t f = i + n0 * k;
                    const std::size_t below = g.index(i, k - 1);
                    const std::size_t above = g.index(i, k);
                    fd.normal[f] = (field[above] - field[below]) / h;
                    fd.tangential[f] = 0.5 * (centered[other][below] + centered[other][above]);
                }
            }
        }
        out.push_back(std::move(fd));
    }
    return out;
}

Field divergence(const Grid& g, std::span<const FaceData> flux) {
    if (flux.size() != static_cast<std::size_t>(g.dim())) {
        throw Error(ErrorKind::GridMismatch, "divergence needs one FaceData per axis");
    }
    const std::size_t n0 = g.cells(0);
    const std::size_t n1 = g.cells(1);
    Field out(g);
    // Fixed per-cell summation order: axis 0 then axis 1.
    for (std::size_t j = 0; j < n1; ++j) {
        for (std::size_t i = 0; i < n0; ++i) {
            const std::size_t c = g.index(i, j);
            double acc = (flux[0].normal[i + 1 + (n0 + 1) * j] - flux[0].normal[i + (n0 + 1) * j]) /
                         g.spacing(0);
            if (g.dim() == 2) {
                acc += (flux[1].normal[i + n0 * (j + 1)] - flux[1].normal[i + n0 * j]) / g.spacing(1);
            }
            out[c] = acc;
        }
    }
    return out;
}

double integrate(const Field& field, Weight weight) {
    const Grid& g = field.grid();
    double sum = 0.0;
    for (std::size_t c = 0; c < field.size(); ++c) {
        double w = 1.0;
        switch (weight.kind) {
            case Weight::Kind::One: break;
            case Weight::Kind::AbsPower: w = std::pow(std::sqrt(g.center_norm_sq(c)), weight.power); break;
            case Weight::Kind::OnePlusSquare: w = 1.0 + g.center_norm_sq(c); break;
        }
        sum += w * field[c];
    }
    return sum * g.cell_volume();
}

double integrate_power(const Field& field, double p) {
    double sum = 0.0;
    for (double v : field.values()) sum += std::pow(std::abs(v), p);
    return sum * field.grid().cell_volume();
}

void write_snapshot(std::ostream& out, const Field& field) {
    const Grid& g = field.grid();
    std::string header = fmt::format("{}", g.dim());
    for (int a = 0; a < g.dim(); ++a) header += fmt::format(" {}", g.cells(a));
    for (int a = 0; a < g.dim(); ++a) header += fmt::format(" {}", g.spacing(a));
    for (int a = 0; a < g.dim(); ++a) header += fmt::format(" {}", g.origin(a));
    out << header << '\n';
    for (double v : field.values()) out << fmt::format("{}\n", v);
}

Field read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::Io, "snapshot: missing header");
    std::istringstream hs(header);
    int d = 0;
    if (!(hs >> d) || d < 1 || d > Grid::kMaxDim) {
        throw Error(ErrorKind::InvalidDimension, "snapshot: bad dimension in header");
    }
    std::array<std::size_t, Grid::kMaxDim> n{1, 1};
    std::array<double, Grid::kMaxDim> h{1.0, 1.0};
    std::array<double, Grid::kMaxDim> origin{0.0, 0.0};
    for (int a = 0; a < d; ++a) hs >> n[a];
    for (int a = 0; a < d; ++a) hs >> h[a];
    for (int a = 0; a < d; ++a) hs >> origin[a];
    if (!hs) throw Error(ErrorKind::Io, "snapshot: truncated header");
    Grid grid(d, n, origin, h);
    std::vector<double> values;
    values.reserve(grid.size());
    std::string line;
    while (values.size() < grid.size() && std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &pos);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Io, fmt::format("snapshot: bad value '{}'", line));
        }
        values.push_back(v);
    }
    if (values.size() != grid.size()) {
        throw Error(ErrorKind::Io,
                    fmt::format("snapshot: expected {} values, got {}", grid.size(), values.size()));
    }
    return Field(grid, std::move(values));
}

void save_snapshot(const std::string& path, const Field& field) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write snapshot '{}'", path));
    write_snapshot(out, field);
}

Field load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read snapshot '{}'", path));
    return read_snapshot(in);
}

}  // namespace fld
