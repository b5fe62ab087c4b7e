#pragma once

#include "fld/flux_limiter.hpp"
#include "fld/grid.hpp"
#include "fld/time_integration.hpp"

#include <array>
#include <optional>
#include <vector>

namespace fld {

enum class ProfileKind { SinglePeak, MultiPeak, Factorized };

struct Peak {
    double amplitude = 1.0;
    std::array<double, Grid::kMaxDim> center{0.0, 0.0};
};

/**
 * Explicit solutions of |grad rho| = chi rho.
 *
 *  - SinglePeak: c exp(-chi |x - x0|) (radial in 2D)
 *  - MultiPeak:  max_i c_i exp(-chi |x - x_i|), 1D only
 *  - Factorized: c exp(-(chi / sqrt(d)) sum_i |x_i - x0_i|)
 *
 * SinglePeak and Factorized use the first peak only. With target_mass set,
 * the amplitudes are rescaled so the midpoint integral matches it exactly.
 */
struct SteadyProfileSpec {
    ProfileKind kind = ProfileKind::SinglePeak;
    double chi = 1.0;
    std::vector<Peak> peaks{Peak{}};
    std::optional<double> target_mass;
};

Field sample(const SteadyProfileSpec& spec, const Grid& grid);

/// Centre of the cell containing x on each axis; keeps the kink symmetric.
std::array<double, Grid::kMaxDim> snap_to_cell_center(const Grid& grid, std::array<double, Grid::kMaxDim> x);

/// Cellwise | |grad rho| - chi rho | with cell-centered gradients.
Field eikonal_residual(const Field& rho, double chi);

/// L1 distance between rho and its evolution to t_probe, divided by t_probe.
/// Requires eps = 0.
double stationarity_drift(const Field& rho, const Params& params, const StepControls& controls, double t_probe);

}  // namespace fld
