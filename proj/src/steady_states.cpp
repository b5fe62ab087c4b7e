#include "fld/steady_states.hpp"

#include "fld/diagnostics.hpp"
#include "fld/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fld {

namespace {

double distance(const Grid& g, std::size_t c, const std::array<double, Grid::kMaxDim>& x0) {
    const auto idx = g.multi_index(c);
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
        const double dx = g.center(a, idx[a]) - x0[a];
        s += dx * dx;
    }
    return std::sqrt(s);
}

double l1_offset(const Grid& g, std::size_t c, const std::array<double, Grid::kMaxDim>& x0) {
    const auto idx = g.multi_index(c);
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += std::abs(g.center(a, idx[a]) - x0[a]);
    return s;
}

}  // namespace

Field sample(const SteadyProfileSpec& spec, const Grid& grid) {
    if (!(spec.chi > 0.0)) throw Error(ErrorKind::ValidationError, "steady profile: chi must be > 0");
    if (spec.peaks.empty()) throw Error(ErrorKind::SpecGridMismatch, "steady profile: at least one peak required");
    for (const auto& p : spec.peaks) {
        if (!(p.amplitude > 0.0)) throw Error(ErrorKind::ValidationError, "steady profile: amplitudes must be > 0");
    }
    if (spec.kind == ProfileKind::MultiPeak && grid.dim() != 1) {
        throw Error(ErrorKind::SpecGridMismatch, "multi-peak profile is defined in 1D only");
    }
    if (spec.target_mass && !(*spec.target_mass > 0.0)) {
        throw Error(ErrorKind::ValidationError, "steady profile: target mass must be > 0");
    }

    Field rho(grid);
    const double chi = spec.chi;
    for (std::size_t c = 0; c < rho.size(); ++c) {
        switch (spec.kind) {
            case ProfileKind::SinglePeak: {
                const Peak& p = spec.peaks.front();
                rho[c] = p.amplitude * std::exp(-chi * distance(grid, c, p.center));
                break;
            }
            case ProfileKind::MultiPeak: {
                double v = 0.0;
                for (const Peak& p : spec.peaks) {
                    v = std::max(v, p.amplitude * std::exp(-chi * distance(grid, c, p.center)));
                }
                rho[c] = v;
                break;
            }
            case ProfileKind::Factorized: {
                const Peak& p = spec.peaks.front();
                const double rate = chi / std::sqrt(static_cast<double>(grid.dim()));
                rho[c] = p.amplitude * std::exp(-rate * l1_offset(grid, c, p.center));
                break;
            }
        }
    }
    if (spec.target_mass) {
        const double scale = *spec.target_mass / integrate(rho);
        for (std::size_t c = 0; c < rho.size(); ++c) rho[c] *= scale;
    }
    return rho;
}

std::array<double, Grid::kMaxDim> snap_to_cell_center(const Grid& grid, std::array<double, Grid::kMaxDim> x) {
    std::array<double, Grid::kMaxDim> out = x;
    for (int a = 0; a < grid.dim(); ++a) {
        const double rel = (x[a] - grid.origin(a)) / grid.spacing(a);
        const auto last = static_cast<double>(grid.cells(a) - 1);
        const double k = std::clamp(std::floor(rel), 0.0, last);
        out[a] = grid.center(a, static_cast<std::size_t>(k));
    }
    return out;
}

Field eikonal_residual(const Field& rho, double chi) {
    const Grid& g = rho.grid();
    const auto grad = cell_gradient(rho);
    Field out(g);
    for (std::size_t c = 0; c < rho.size(); ++c) {
        double s = 0.0;
        for (int a = 0; a < g.dim(); ++a) s += grad[a][c] * grad[a][c];
        out[c] = std::abs(std::sqrt(s) - chi * rho[c]);
    }
    return out;
}

double stationarity_drift(const Field& rho, const Params& params, const StepControls& controls, double t_probe) {
    if (params.eps != 0.0) throw Error(ErrorKind::InvalidArgument, "stationarity_drift requires eps = 0");
    if (!(t_probe > 0.0)) throw Error(ErrorKind::InvalidArgument, "stationarity_drift: t_probe must be > 0");
    RunOptions opts;
    opts.t_end = t_probe;
    opts.diag_stride = std::numeric_limits<std::size_t>::max();
    opts.p_set = {};
    const Trajectory traj = run(rho, params, controls, opts);
    return l1_distance(traj.snapshots.back().second, rho) / t_probe;
}

}  // namespace fld
