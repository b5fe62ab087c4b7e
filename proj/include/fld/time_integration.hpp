#pragma once

#include "fld/diagnostics.hpp"
#include "fld/flux_limiter.hpp"
#include "fld/grid.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace fld {

enum class Scheme { Explicit, SemiImplicit };

struct StepControls {
    double dt = 0.0;
    double cfl_safety = 0.45;
    double picard_tol = 1e-10;
    int picard_max_iter = 200;
    double linear_solver_tol = 1e-12;
    Scheme scheme = Scheme::Explicit;
};

/// Explicit Euler ceiling safety * h_min^2 / (2 d (1 + eps)).
double cfl_dt(const Grid& grid, double eps, double safety);

/// Face fluxes (limiter(mean rho, |grad rho|) + eps) * d_n rho for every axis.
std::vector<FaceData> limited_flux(const Field& rho, const Params& params);

/// rho + dt div(flux) - dt eps rho. Throws CflViolation when dt exceeds the
/// unit-safety CFL bound and NumericalFailure on non-finite/negative output.
Field step_explicit(const Field& rho, const Params& params, const StepControls& controls);

struct PicardStats {
    int iterations = 0;
    double last_change = 0.0;
    std::vector<double> changes;  // relative L2 change per iteration
};

/**
 * Backward Euler with frozen limiter coefficients.
 *
 * Each Picard sweep evaluates the face coefficients from the previous
 * iterate (density and gradient slots alike), solves the resulting SPD
 * system with conjugate gradients, and stops once the relative L2 change
 * between iterates drops below picard_tol. If the coefficients recomputed
 * from a new iterate coincide with the frozen ones, that iterate is already
 * the fixed point. A sweep whose change would exceed the previous one is
 * retried with the frozen iterate moved only part of the way (halving) towards
 * the last solve, so the recorded changes never grow.
 */
Field step_semi_implicit(const Field& rho, const Params& params, const StepControls& controls,
                         PicardStats* stats = nullptr);

Field step(const Field& rho, const Params& params, const StepControls& controls);

struct Trajectory {
    std::vector<std::pair<double, Field>> snapshots;
    std::vector<DiagnosticsRecord> records;
    std::size_t steps = 0;
};

struct RunOptions {
    double t_end = 0.0;
    std::size_t diag_stride = 10;
    std::size_t snapshot_stride = 0;  // 0: initial and final snapshots only
    std::vector<double> p_set{4.0};
};

/// Fixed-dt march to t_end; the last step is shortened to land on t_end.
/// Records diagnostics at t = 0, every diag_stride steps, and at t_end.
Trajectory run(const Field& initial, const Params& params, const StepControls& controls,
               const RunOptions& options);

/// Step count and final step size for a fixed-dt march to t_end.
std::pair<std::size_t, double> step_schedule(double t_end, double dt);

}  // namespace fld
