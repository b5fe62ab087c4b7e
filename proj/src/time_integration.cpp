#include "fld/time_integration.hpp"

#include "fld/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include <cmath>

namespace fld {

double cfl_dt(const Grid& grid, double eps, double safety) {
    if (!(safety > 0.0) || safety > 1.0) {
        throw Error(ErrorKind::InvalidArgument, fmt::format("cfl safety {} not in (0, 1]", safety));
    }
    if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be >= 0");
    const double h = grid.min_spacing();
    return safety * h * h / (2.0 * grid.dim() * (1.0 + eps));
}

namespace {

// Face coefficient limiter(mean rho, |grad|) + eps, stored alongside the
// normal gradient so both steppers share one evaluation.
struct FaceCoefficients {
    std::vector<FaceData> grad;
    std::vector<std::vector<double>> coef;  // per axis, per face
};

std::size_t left_cell(const Grid& g, int axis, std::size_t face) {
    const std::size_t n0 = g.cells(0);
    if (axis == 0) {
        const std::size_t k = face % (n0 + 1);
        const std::size_t j = face / (n0 + 1);
        return g.index(k - 1, j);
    }
    const std::size_t i = face % n0;
    const std::size_t k = face / n0;
    return g.index(i, k - 1);
}

std::size_t right_cell(const Grid& g, int axis, std::size_t face) {
    return left_cell(g, axis, face) + (axis == 0 ? 1 : g.cells(0));
}

FaceCoefficients face_coefficients(const Field& rho, const Params& params) {
    const Grid& g = rho.grid();
    FaceCoefficients fc;
    fc.grad = face_gradient(rho);
    fc.coef.resize(g.dim());
    for (int axis = 0; axis < g.dim(); ++axis) {
        const FaceData& fd = fc.grad[axis];
        auto& coef = fc.coef[axis];
        coef.assign(fd.normal.size(), 0.0);
        for (std::size_t f = 0; f < fd.normal.size(); ++f) {
            if (fd.is_boundary(f)) continue;
            const double rho_face = 0.5 * (rho[left_cell(g, axis, f)] + rho[right_cell(g, axis, f)]);
            double gsq = fd.normal[f] * fd.normal[f];
            if (!fd.tangential.empty()) gsq += fd.tangential[f] * fd.tangential[f];
            coef[f] = limiter(rho_face, std::sqrt(gsq), params.chi) + params.eps;
        }
    }
    return fc;
}

void require_step_input(const Field& rho, const Params& params, const StepControls& controls) {
    params.validate();
    if (!(controls.dt > 0.0) || !std::isfinite(controls.dt)) {
        throw Error(ErrorKind::InvalidArgument, fmt::format("dt must be positive (got {})", controls.dt));
    }
    require_density(rho, "step input");
}

}  // namespace

std::vector<FaceData> limited_flux(const Field& rho, const Params& params) {
    FaceCoefficients fc = face_coefficients(rho, params);
    std::vector<FaceData> flux = std::move(fc.grad);
    for (std::size_t axis = 0; axis < flux.size(); ++axis) {
        auto& fd = flux[axis];
        for (std::size_t f = 0; f < fd.normal.size(); ++f) fd.normal[f] *= fc.coef[axis][f];
        fd.tangential.clear();
    }
    return flux;
}

Field step_explicit(const Field& rho, const Params& params, const StepControls& controls) {
    require_step_input(rho, params, controls);
    const double limit = cfl_dt(rho.grid(), params.eps, 1.0);
    if (controls.dt > limit * (1.0 + 1e-12)) {
        throw Error(ErrorKind::CflViolation,
                    fmt::format("dt = {} exceeds the explicit stability limit {}", controls.dt, limit));
    }
    const auto flux = limited_flux(rho, params);
    const Field div = divergence(rho.grid(), flux);
    Field out(rho.grid());
    const double dt = controls.dt;
    const double decay = 1.0 - dt * params.eps;
    for (std::size_t c = 0; c < rho.size(); ++c) out[c] = decay * rho[c] + dt * div[c];
    require_density(out, "step_explicit");
    return out;
}

namespace {

// One frozen-coefficient solve: (1 + dt eps) x - dt div(a[frozen] grad x) = rhs.
Field solve_frozen(const Field& frozen, const FaceCoefficients& fc, const Eigen::VectorXd& rhs,
                   const Params& params, const StepControls& controls) {
    const Grid& g = frozen.grid();
    const std::size_t n = g.size();
    const double dt = controls.dt;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * (1 + 2 * g.dim()));
    std::vector<double> diag(n, 1.0 + dt * params.eps);
    for (int axis = 0; axis < g.dim(); ++axis) {
        const double w = dt / (g.spacing(axis) * g.spacing(axis));
        const auto& coef = fc.coef[axis];
        for (std::size_t f = 0; f < coef.size(); ++f) {
            if (coef[f] == 0.0) continue;
            const std::size_t l = left_cell(g, axis, f);
            const std::size_t r = right_cell(g, axis, f);
            const double a = w * coef[f];
            diag[l] += a;
            diag[r] += a;
            triplets.emplace_back(static_cast<int>(l), static_cast<int>(r), -a);
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(l), -a);
        }
    }
    for (std::size_t c = 0; c < n; ++c) triplets.emplace_back(static_cast<int>(c), static_cast<int>(c), diag[c]);
    Eigen::SparseMatrix<double> matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    matrix.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(controls.linear_solver_tol);
    cg.setMaxIterations(static_cast<Eigen::Index>(std::max<std::size_t>(10 * n, 1000)));
    cg.compute(matrix);
    Eigen::VectorXd guess(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) guess[static_cast<Eigen::Index>(c)] = frozen[c];
    const Eigen::VectorXd sol = cg.solveWithGuess(rhs, guess);
    if (cg.info() != Eigen::Success) {
        throw Error(ErrorKind::NumericalFailure,
                    fmt::format("linear solve failed after {} CG iterations (error {})", cg.iterations(), cg.error()));
    }
    Field out(g);
    for (std::size_t c = 0; c < n; ++c) out[c] = sol[static_cast<Eigen::Index>(c)];
    if (!out.all_finite()) throw Error(ErrorKind::NumericalFailure, "step_semi_implicit: non-finite iterate");
    return out;
}

// Relative L2 change between a frozen iterate and its solve.
double relative_change(const Field& from, const Field& to) {
    double diff_sq = 0.0, norm_sq = 0.0;
    for (std::size_t c = 0; c < to.size(); ++c) {
        const double d = to[c] - from[c];
        diff_sq += d * d;
        norm_sq += to[c] * to[c];
    }
    return norm_sq > 0.0 ? std::sqrt(diff_sq / norm_sq) : std::sqrt(diff_sq);
}

constexpr int kMaxHalvings = 12;

}  // namespace

Field step_semi_implicit(const Field& rho, const Params& params, const StepControls& controls,
                         PicardStats* stats) {
    require_step_input(rho, params, controls);
    if (controls.picard_max_iter < 1) throw Error(ErrorKind::InvalidArgument, "picard_max_iter must be >= 1");

    const Grid& g = rho.grid();
    const std::size_t n = g.size();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) rhs[static_cast<Eigen::Index>(c)] = rho[c];

    Field frozen = rho;
    FaceCoefficients fc = face_coefficients(frozen, params);
    Field solved = solve_frozen(frozen, fc, rhs, params, controls);
    double change = relative_change(frozen, solved);
    PicardStats local;

    for (int it = 1;; ++it) {
        local.iterations = it;
        local.last_change = change;
        local.changes.push_back(change);

        FaceCoefficients solved_fc = face_coefficients(solved, params);
        if (change <= controls.picard_tol || solved_fc.coef == fc.coef) {
            // CG tolerances can leave round-off sized negatives next to vacuum.
            double norm_sq = 0.0;
            for (std::size_t c = 0; c < n; ++c) norm_sq += solved[c] * solved[c];
            for (std::size_t c = 0; c < n; ++c) {
                if (solved[c] < 0.0 && solved[c] > -controls.linear_solver_tol * std::sqrt(norm_sq)) solved[c] = 0.0;
            }
            require_density(solved, "step_semi_implicit");
            if (stats) *stats = std::move(local);
            return solved;
        }
        if (it == controls.picard_max_iter) break;

        // Plain Picard takes the solve as the next frozen iterate. Near the
        // switching set of the limiter that can cycle, so the step towards the
        // solve is halved until the change stops growing.
        Field next_frozen = solved;
        FaceCoefficients next_fc = std::move(solved_fc);
        Field next_solved = solve_frozen(next_frozen, next_fc, rhs, params, controls);
        double next_change = relative_change(next_frozen, next_solved);
        double weight = 1.0;
        for (int k = 0; k < kMaxHalvings && next_change > change; ++k) {
            weight *= 0.5;
            for (std::size_t c = 0; c < n; ++c) next_frozen[c] = frozen[c] + weight * (solved[c] - frozen[c]);
            next_fc = face_coefficients(next_frozen, params);
            next_solved = solve_frozen(next_frozen, next_fc, rhs, params, controls);
            next_change = relative_change(next_frozen, next_solved);
        }
        frozen = std::move(next_frozen);
        fc = std::move(next_fc);
        solved = std::move(next_solved);
        change = next_change;
    }
    if (stats) *stats = local;
    throw Error(ErrorKind::PicardDivergence,
                fmt::format("Picard iteration did not converge in {} iterations (last change {})",
                            controls.picard_max_iter, local.last_change));
}

Field step(const Field& rho, const Params& params, const StepControls& controls) {
    return controls.scheme == Scheme::Explicit ? step_explicit(rho, params, controls)
                                               : step_semi_implicit(rho, params, controls);
}

std::pair<std::size_t, double> step_schedule(double t_end, double dt) {
    if (!(t_end > 0.0)) return {0, 0.0};
    auto steps = static_cast<std::size_t>(std::ceil(t_end / dt * (1.0 - 1e-12)));
    if (steps == 0) steps = 1;
    const double last = t_end - static_cast<double>(steps - 1) * dt;
    return {steps, last};
}

Trajectory run(const Field& initial, const Params& params, const StepControls& controls,
               const RunOptions& options) {
    params.validate();
    require_density(initial, "run initial data");
    if (options.t_end < 0.0 || !std::isfinite(options.t_end)) {
        throw Error(ErrorKind::InvalidArgument, "t_end must be >= 0");
    }
    if (options.diag_stride == 0) throw Error(ErrorKind::InvalidArgument, "diag_stride must be >= 1");

    Trajectory traj;
    traj.snapshots.emplace_back(0.0, initial);
    traj.records.push_back(record(initial, options.p_set, 0.0));
    if (options.t_end == 0.0) return traj;
    if (!(controls.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");

    const auto [steps, last_dt] = step_schedule(options.t_end, controls.dt);
    Field rho = initial;
    StepControls sc = controls;
    for (std::size_t s = 1; s <= steps; ++s) {
        sc.dt = (s == steps) ? last_dt : controls.dt;
        rho = step(rho, params, sc);
        const double t = (s == steps) ? options.t_end : static_cast<double>(s) * controls.dt;
        if (s % options.diag_stride == 0 || s == steps) traj.records.push_back(record(rho, options.p_set, t));
        if ((options.snapshot_stride > 0 && s % options.snapshot_stride == 0) || s == steps) {
            traj.snapshots.emplace_back(t, rho);
        }
    }
    traj.steps = steps;
    return traj;
}

}  // namespace fld
