#include "fld/studies.hpp"

#include "fld/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>

namespace fld {

bool StudyReport::all_passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const Verdict* StudyReport::find(const std::string& name) const {
    for (const auto& v : verdicts) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

std::string StudyReport::text() const {
    std::string out = fmt::format("study: {}\n", kind);
    for (const auto& line : inputs) out += fmt::format("input: {}\n", line);
    if (!columns.empty()) {
        out += "\n";
        for (const auto& c : columns) out += fmt::format("{:>24}", c);
        out += "\n";
        for (const auto& row : rows) {
            for (double v : row) out += fmt::format("{:>24.12g}", v);
            out += "\n";
        }
        out += "\n";
    }
    for (const auto& n : notes) out += fmt::format("{}\n", n);
    for (const auto& v : verdicts) {
        out += fmt::format("VERDICT {} {}", v.name, v.passed ? "PASS" : "FAIL");
        if (!v.detail.empty()) out += fmt::format("  # {}", v.detail);
        out += "\n";
    }
    return out;
}

std::string StudyReport::csv() const {
    std::string out;
    for (std::size_t k = 0; k < columns.size(); ++k) out += (k ? "," : "") + columns[k];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += fmt::format("{}{}", k ? "," : "", row[k]);
        out += "\n";
    }
    return out;
}

void write_report(const StudyReport& report, const std::string& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir);
    std::ofstream txt(base / (stem + "_report.txt"));
    std::ofstream csv(base / (stem + ".csv"));
    if (!txt || !csv) throw Error(ErrorKind::Io, fmt::format("cannot write report files in '{}'", dir));
    txt << report.text();
    csv << report.csv();
}

Field advance(const Field& rho, const Params& params, const StepControls& controls, double duration) {
    if (!(duration > 0.0)) return rho;
    const auto [steps, last] = step_schedule(duration, controls.dt);
    Field out = rho;
    StepControls sc = controls;
    for (std::size_t s = 1; s <= steps; ++s) {
        sc.dt = s == steps ? last : controls.dt;
        out = step(out, params, sc);
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "fit_line needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "fit_line: abscissae are all equal");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += x[k] * y[k];
        sxx += x[k] * x[k];
    }
    if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "fit_through_origin: zero abscissae");
    return sxy / sxx;
}

double default_sigma(const Field& v) {
    double sup = 0.0;
    for (double x : v.values()) sup = std::max(sup, x);
    return 1e-12 * sup;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw Error(ErrorKind::InvalidArgument, "log_spaced: bad range");
    if (count == 1) return {hi};
    std::vector<double> out(count);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
    }
    out.back() = hi;
    return out;
}

namespace {

// Runs jobs[k]() for every k with at most `threads` in flight; results keep
// input order.
template <typename T>
std::vector<T> run_parallel(const std::vector<std::function<T()>>& jobs, unsigned threads) {
    std::vector<T> results;
    results.reserve(jobs.size());
    if (threads <= 1) {
        for (const auto& job : jobs) results.push_back(job());
        return results;
    }
    for (std::size_t start = 0; start < jobs.size(); start += threads) {
        std::vector<std::future<T>> batch;
        const std::size_t stop = std::min(jobs.size(), start + threads);
        for (std::size_t k = start; k < stop; ++k) batch.push_back(std::async(std::launch::async, jobs[k]));
        for (auto& f : batch) results.push_back(f.get());
    }
    return results;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k) s += fmt::format("{}{}", k ? ", " : "", xs[k]);
    return s;
}

double sup_norm(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

StudyReport simulate(const RunConfig& cfg, const std::string& out_dir) {
    const Field initial = make_initial(cfg);
    const StepControls controls = resolve_controls(cfg, initial.grid(), cfg.params.eps);
    RunOptions opts;
    opts.t_end = cfg.t_end;
    opts.diag_stride = cfg.diag_stride;
    opts.snapshot_stride = cfg.snapshot_stride;
    opts.p_set = cfg.p_set;
    const Trajectory traj = run(initial, cfg.params, controls, opts);

    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    {
        std::ofstream csv(dir / "diagnostics.csv");
        if (!csv) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", (dir / "diagnostics.csv").string()));
        write_csv(csv, traj.records, cfg.p_set);
    }
    save_snapshot((dir / "final.snap").string(), traj.snapshots.back().second);
    if (cfg.snapshot_stride > 0) {
        for (std::size_t k = 1; k + 1 < traj.snapshots.size(); ++k) {
            const auto step = static_cast<std::size_t>(std::llround(traj.snapshots[k].first / controls.dt));
            save_snapshot((dir / fmt::format("snap_{:08d}.snap", step)).string(), traj.snapshots[k].second);
        }
    }

    StudyReport rep;
    rep.kind = "simulate";
    rep.inputs.push_back(fmt::format("dim = {}, cells = {}, extent = {}", cfg.dim, cfg.cells, cfg.extent));
    rep.inputs.push_back(fmt::format("chi = {}, eps = {}, dt = {}, t_end = {}, steps = {}", cfg.params.chi,
                                     cfg.params.eps, controls.dt, cfg.t_end, traj.steps));
    const auto& first = traj.records.front();
    const auto& last = traj.records.back();
    const double expected = first.mass * std::exp(-cfg.params.eps * cfg.t_end);
    rep.notes.push_back(fmt::format("mass {} -> {} (continuum law {})", first.mass, last.mass, expected));
    rep.notes.push_back(fmt::format("sup {} -> {}, entropy {} -> {}", first.sup_norm, last.sup_norm, first.entropy,
                                    last.entropy));
    rep.verdicts.push_back({"simulate_completed", true, fmt::format("{} records", traj.records.size())});
    return rep;
}

StudyReport viscosity_study(const RunConfig& base, const std::vector<double>& eps_list, unsigned threads) {
    if (eps_list.size() < 2) throw Error(ErrorKind::ValidationError, "eps_list: needs at least two viscosities");
    for (std::size_t k = 0; k + 1 < eps_list.size(); ++k) {
        if (!(eps_list[k] > eps_list[k + 1])) {
            throw Error(ErrorKind::ValidationError, "eps_list: must be strictly decreasing (no duplicates)");
        }
    }
    if (eps_list.back() < 0.0) throw Error(ErrorKind::ValidationError, "eps_list: viscosities must be >= 0");

    const Field initial = make_initial(base);
    const StepControls controls = resolve_controls(base, initial.grid(), eps_list.front());

    std::vector<std::function<Field()>> jobs;
    for (double eps : eps_list) {
        jobs.emplace_back([&, eps] {
            Params p = base.params;
            p.eps = eps;
            return advance(initial, p, controls, base.t_end);
        });
    }
    const std::vector<Field> finals = run_parallel(jobs, threads);

    StudyReport rep;
    rep.kind = "viscosity";
    rep.inputs.push_back(fmt::format("eps_list = {}", join(eps_list)));
    rep.inputs.push_back(fmt::format("chi = {}, t_end = {}, dt = {}, cells = {}", base.params.chi, base.t_end,
                                     controls.dt, initial.grid().cells(0)));
    rep.columns = {"eps", "delta", "eps_plus_delta", "H", "L1"};

    std::vector<double> sums, hs, l1s;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        const Field& u = finals[k];
        const Field& v = finals[k + 1];
        const double sigma = base.sigma ? *base.sigma : default_sigma(v);
        const double h = relative_entropy(u, v, sigma);
        const double l1 = l1_distance(u, v);
        rep.rows.push_back({eps_list[k], eps_list[k + 1], eps_list[k] + eps_list[k + 1], h, l1});
        sums.push_back(eps_list[k] + eps_list[k + 1]);
        hs.push_back(h);
        l1s.push_back(l1);
    }

    bool h_dec = true, l1_dec = true;
    for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
        h_dec = h_dec && hs[k + 1] < hs[k];
        l1_dec = l1_dec && l1s[k + 1] < l1s[k];
    }
    rep.verdicts.push_back({"viscosity_h_decreasing", h_dec, "H(T) strictly decreasing along consecutive pairs"});
    rep.verdicts.push_back({"viscosity_l1_decreasing", l1_dec, "L1(T) strictly decreasing along consecutive pairs"});

    const double origin_slope = fit_through_origin(sums, hs);
    rep.notes.push_back(fmt::format("fit through origin: H = {} (eps + delta)", origin_slope));
    if (hs.size() >= 2) {
        const LineFit fit = fit_line(sums, hs);
        const double hmax = *std::max_element(hs.begin(), hs.end());
        rep.notes.push_back(fmt::format("affine fit: H = {} (eps + delta) + {}", fit.slope, fit.intercept));
        rep.verdicts.push_back({"viscosity_fit_slope_positive", fit.slope > 0.0, fmt::format("slope {}", fit.slope)});
        rep.verdicts.push_back({"viscosity_fit_intercept_small", std::abs(fit.intercept) <= 0.1 * hmax,
                                fmt::format("|intercept| {} vs 10% of max H {}", std::abs(fit.intercept), 0.1 * hmax)});
    }
    return rep;
}

RunConfig shifted_config(const RunConfig& cfg) {
    RunConfig out = cfg;
    out.initial.center[0] += cfg.shift;
    for (auto& p : out.initial.peaks) p.center[0] += cfg.shift;
    return out;
}

StudyReport contraction_study(const RunConfig& cfg1, const RunConfig& cfg2) {
    if (cfg1.params.eps != 0.0 || cfg2.params.eps != 0.0) {
        throw ConfigError(ErrorKind::ValidationError, "eps", 0, "eps: contraction study requires eps = 0");
    }
    if (cfg1.params.chi != cfg2.params.chi) {
        throw ConfigError(ErrorKind::ValidationError, "chi", 0, "chi: both runs must share chi");
    }
    const Field init1 = make_initial(cfg1);
    const Field init2 = make_initial(cfg2);
    if (!(init1.grid() == init2.grid())) throw Error(ErrorKind::GridMismatch, "contraction study: grids differ");
    for (const Field* f : {&init1, &init2}) {
        for (double v : f->values()) {
            if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "contraction study needs strictly positive data");
        }
    }
    const Params params = cfg1.params;
    StepControls controls = resolve_controls(cfg1, init1.grid(), 0.0);
    controls.dt = std::min(controls.dt, resolve_controls(cfg2, init2.grid(), 0.0).dt);

    StudyReport rep;
    rep.kind = "contraction";
    rep.inputs.push_back(fmt::format("chi = {}, t_end = {}, dt = {}, cells = {}", params.chi, cfg1.t_end, controls.dt,
                                     init1.grid().cells(0)));
    rep.columns = {"time", "step", "H", "D1", "D2", "L1"};

    auto sample = [&](const Field& a, const Field& b, double t, std::size_t s) {
        const double sigma = cfg1.sigma ? *cfg1.sigma : default_sigma(b);
        const double h = relative_entropy(a, b, sigma);
        const Dissipation d = dissipation_terms(a, b, params.chi);
        rep.rows.push_back({t, static_cast<double>(s), h, d.d1, d.d2, l1_distance(a, b)});
    };

    Field a = init1, b = init2;
    sample(a, b, 0.0, 0);
    const auto [steps, last] = step_schedule(cfg1.t_end, controls.dt);
    StepControls sc = controls;
    for (std::size_t s = 1; s <= steps; ++s) {
        sc.dt = s == steps ? last : controls.dt;
        a = step(a, params, sc);
        b = step(b, params, sc);
        if (s % cfg1.diag_stride == 0 || s == steps) {
            const double t = s == steps ? cfg1.t_end : static_cast<double>(s) * controls.dt;
            sample(a, b, t, s);
        }
    }

    const double h0 = rep.rows.front()[2];
    double worst_increase = -std::numeric_limits<double>::infinity();
    bool nonincreasing = true;
    double hmax = 0.0;
    bool dissipation_ok = true;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& row = rep.rows[k];
        hmax = std::max(hmax, row[2]);
        dissipation_ok = dissipation_ok && row[3] >= 0.0 && row[4] >= 0.0;
        if (k == 0) continue;
        const auto& prev = rep.rows[k - 1];
        const double slack = 1e-8 * h0 * (row[1] - prev[1]);
        const double increase = row[2] - prev[2];
        worst_increase = std::max(worst_increase, increase);
        nonincreasing = nonincreasing && increase <= slack;
    }
    if (h0 > 0.0) {
        rep.verdicts.push_back({"contraction_h_nonincreasing", nonincreasing,
                                fmt::format("largest increase between records {} (slack 1e-8 H(0) per step, H(0) = {})",
                                            worst_increase, h0)});
    } else {
        rep.verdicts.push_back(
            {"contraction_identical_zero", hmax <= 1e-12, fmt::format("max H {} for identical data", hmax)});
    }
    rep.verdicts.push_back({"contraction_dissipation_nonnegative", dissipation_ok, "D1, D2 >= 0 at every record"});
    return rep;
}

StudyReport smoothing_study(const RunConfig& base, double p, const std::vector<double>& spike_widths,
                            unsigned threads) {
    if (spike_widths.empty()) throw Error(ErrorKind::ValidationError, "spike_widths: at least one width required");
    if (!(p >= 1.0)) throw Error(ErrorKind::ValidationError, "spike_p: must be >= 1");
    const Grid grid = make_config_grid(base);
    const int d = grid.dim();
    const double exponent = d / (2.0 * p);
    const double alt_exponent = (d + 2.0) / (2.0 * p);
    const double norm = base.initial.spike_norm;
    const std::vector<double> probes = log_spaced(base.probe_min, base.t_end, base.probes);

    Params limited = base.params;
    limited.eps = 0.0;
    Params heat;
    heat.chi = 0.0;
    heat.eps = 0.0;
    const StepControls controls = resolve_controls(base, grid, 0.0);

    struct SpikeResult {
        std::vector<double> sups;
        double heat_time = 0.0;
        double heat_sup = 0.0;
    };
    std::vector<std::function<SpikeResult()>> jobs;
    for (double w : spike_widths) {
        jobs.emplace_back([&, w] {
            SpikeResult r;
            const Field init = polynomial_spike(grid, base.initial.center, w, p, norm);
            Field rho = init;
            double t = 0.0;
            for (double tp : probes) {
                rho = advance(rho, limited, controls, tp - t);
                t = tp;
                r.sups.push_back(sup_norm(rho));
            }
            r.heat_time = base.heat_probe_factor * w * w;
            r.heat_sup = sup_norm(advance(init, heat, controls, r.heat_time));
            return r;
        });
    }
    const std::vector<SpikeResult> results = run_parallel(jobs, threads);

    StudyReport rep;
    rep.kind = "smoothing";
    rep.inputs.push_back(fmt::format("p = {}, d = {}, ||rho_in||_p = {}, widths = {}", p, d, norm, join(spike_widths)));
    rep.inputs.push_back(fmt::format("chi = {}, t_end = {}, dt = {}, probes = {} in [{}, {}]", base.params.chi,
                                     base.t_end, controls.dt, probes.size(), probes.front(), probes.back()));
    rep.columns = {"width", "time", "sup", "ratio_d_2p", "ratio_d2_2p"};

    std::vector<double> envelope, alt_envelope;
    for (std::size_t k = 0; k < results.size(); ++k) {
        double env = 0.0, alt = 0.0;
        for (std::size_t j = 0; j < probes.size(); ++j) {
            const double t = probes[j];
            const double ratio = results[k].sups[j] / (norm * (1.0 + std::pow(t, -exponent)));
            const double ratio_alt = results[k].sups[j] / (norm * (1.0 + std::pow(t, -alt_exponent)));
            env = std::max(env, ratio);
            alt = std::max(alt, ratio_alt);
            rep.rows.push_back({spike_widths[k], t, results[k].sups[j], ratio, ratio_alt});
        }
        envelope.push_back(env);
        alt_envelope.push_back(alt);
        rep.notes.push_back(fmt::format("width {}: envelope C = {} (exponent d/2p), {} (exponent (d+2)/2p)",
                                        spike_widths[k], env, alt));
    }
    const auto [emin, emax] = std::minmax_element(envelope.begin(), envelope.end());
    const double spread = *emax / *emin;
    rep.verdicts.push_back({"smoothing_envelope_stable", spread <= 2.0,
                            fmt::format("max/min envelope constant {} across the family", spread)});
    const auto [amin, amax] = std::minmax_element(alt_envelope.begin(), alt_envelope.end());
    rep.notes.push_back(fmt::format("alternative exponent envelope spread {}", *amax / *amin));

    std::vector<double> log_t, log_sup;
    for (const auto& r : results) {
        log_t.push_back(std::log(r.heat_time));
        log_sup.push_back(std::log(r.heat_sup));
        rep.notes.push_back(fmt::format("heat control: t = {}, sup = {}", r.heat_time, r.heat_sup));
    }
    if (results.size() >= 2) {
        const double slope = fit_line(log_t, log_sup).slope;
        const double rel = std::abs(slope + exponent) / exponent;
        rep.notes.push_back(fmt::format("heat control log-log slope {} (classical {})", slope, -exponent));
        rep.verdicts.push_back({"smoothing_heat_slope", rel <= 0.1, fmt::format("relative slope error {}", rel)});
    }
    return rep;
}

StudyReport monotonicity_test(std::size_t samples, const std::vector<int>& dims, const std::vector<double>& c_list,
                              std::uint64_t seed) {
    if (samples < 1) throw Error(ErrorKind::InvalidArgument, "monotonicity_test: samples must be >= 1");
    StudyReport rep;
    rep.kind = "monotonicity";
    rep.inputs.push_back(fmt::format("samples = {}, seed = {}", samples, seed));
    rep.columns = {"dim", "c", "min_gap_clamped", "min_gap_unclamped", "negative_unclamped"};

    std::uint64_t state = seed;
    auto uniform = [&state] {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return -10.0 + 20.0 * (static_cast<double>(z >> 11) * 0x1.0p-53);
    };

    double min_clamped = std::numeric_limits<double>::infinity();
    double min_unclamped = std::numeric_limits<double>::infinity();
    for (int d : dims) {
        for (double c : c_list) {
            std::vector<double> w(d), z(d);
            double mc = std::numeric_limits<double>::infinity();
            double mu = std::numeric_limits<double>::infinity();
            std::size_t negative = 0;
            for (std::size_t s = 0; s < samples; ++s) {
                for (int k = 0; k < d; ++k) w[k] = uniform();
                for (int k = 0; k < d; ++k) z[k] = uniform();
                mc = std::min(mc, monotone_gap(w, z, c));
                const double gu = unclamped_gap(w, z, c);
                mu = std::min(mu, gu);
                if (gu < 0.0) ++negative;
            }
            rep.rows.push_back({static_cast<double>(d), c, mc, mu, static_cast<double>(negative)});
            min_clamped = std::min(min_clamped, mc);
            min_unclamped = std::min(min_unclamped, mu);
        }
    }
    rep.verdicts.push_back({"monotone_clamped_nonnegative", min_clamped >= -1e-12,
                            fmt::format("min clamped gap {}", min_clamped)});
    rep.verdicts.push_back({"monotone_unclamped_violated", min_unclamped < -1e-6,
                            fmt::format("min unclamped gap {}", min_unclamped)});
    return rep;
}

namespace {

// Cells at least `margin` away from every kink of a steady profile.
bool away_from_kinks(const Grid& g, std::size_t c, InitialKind kind, const std::vector<Peak>& peaks, double chi,
                     double margin) {
    const auto idx = g.multi_index(c);
    // Wall cells use one-sided differences.
    for (int a = 0; a < g.dim(); ++a) {
        if (idx[a] < 2 || idx[a] + 2 >= g.cells(a)) return false;
    }
    if (kind == InitialKind::Factorized) {
        for (int a = 0; a < g.dim(); ++a) {
            if (std::abs(g.center(a, idx[a]) - peaks.front().center[a]) < margin) return false;
        }
        return true;
    }
    for (const auto& p : peaks) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) {
            const double dx = g.center(a, idx[a]) - p.center[a];
            r2 += dx * dx;
        }
        if (std::sqrt(r2) < margin) return false;
    }
    if (peaks.size() > 1) {
        // The valley where two peaks cross is a kink as well.
        std::vector<double> logs;
        for (const auto& p : peaks) logs.push_back(std::log(p.amplitude) - chi * std::abs(g.center(0, idx[0]) - p.center[0]));
        std::sort(logs.begin(), logs.end(), std::greater<>());
        if (logs[0] - logs[1] < 2.0 * chi * margin) return false;
    }
    return true;
}

}  // namespace

StudyReport steady_check(const RunConfig& cfg) {
    const auto kind = cfg.initial.kind;
    if (kind != InitialKind::SinglePeak && kind != InitialKind::MultiPeak && kind != InitialKind::Factorized) {
        throw ConfigError(ErrorKind::ValidationError, "initial", 0,
                          "initial: steady check needs single_peak, multi_peak or factorized");
    }
    if (cfg.params.eps != 0.0) throw ConfigError(ErrorKind::ValidationError, "eps", 0, "eps: steady check needs eps = 0");
    if (!(cfg.params.chi > 0.0)) throw ConfigError(ErrorKind::ValidationError, "chi", 0, "chi: must be > 0");

    StudyReport rep;
    rep.kind = "steady";
    rep.inputs.push_back(fmt::format("chi = {}, cells = {} and {}, t_probe = {}", cfg.params.chi, cfg.cells,
                                     2 * cfg.cells, cfg.t_probe));
    rep.columns = {"h", "max_residual_smooth", "drift"};

    const double margin = 0.5;
    std::vector<double> residuals, drifts, spacings;
    for (std::size_t refine : {std::size_t{1}, std::size_t{2}}) {
        RunConfig c = cfg;
        c.cells = cfg.cells * refine;
        const Field rho = make_initial(c);
        const Grid& g = rho.grid();
        std::vector<Peak> peaks = kind == InitialKind::MultiPeak ? c.initial.peaks
                                                                 : std::vector<Peak>{Peak{1.0, c.initial.center}};
        if (c.initial.snap_center) {
            for (auto& p : peaks) p.center = snap_to_cell_center(g, p.center);
        }
        const Field res = eikonal_residual(rho, c.params.chi);
        double worst = 0.0;
        for (std::size_t k = 0; k < res.size(); ++k) {
            if (away_from_kinks(g, k, kind, peaks, c.params.chi, margin)) worst = std::max(worst, res[k]);
        }
        const StepControls sc = resolve_controls(c, g, 0.0);
        const double drift = stationarity_drift(rho, c.params, sc, c.t_probe);
        rep.rows.push_back({g.spacing(0), worst, drift});
        residuals.push_back(worst);
        drifts.push_back(drift);
        spacings.push_back(g.spacing(0));
    }
    rep.verdicts.push_back({"steady_eikonal_converges", residuals[1] <= residuals[0] / 3.0 || residuals[1] <= 1e-14,
                            fmt::format("residual {} -> {} under refinement", residuals[0], residuals[1])});
    rep.verdicts.push_back({"steady_drift_first_order", drifts[1] <= 0.6 * drifts[0] + 1e-14,
                            fmt::format("drift {} -> {} under refinement", drifts[0], drifts[1])});
    rep.verdicts.push_back({"steady_drift_bounded", drifts[0] <= spacings[0],
                            fmt::format("drift {} vs h = {}", drifts[0], spacings[0])});
    return rep;
}

}  // namespace fld
