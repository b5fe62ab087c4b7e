#include "fld/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fld {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(const std::string& key, int line, const std::string& msg) {
    throw ConfigError(ErrorKind::ParseError, key, line, fmt::format("line {}: {}", line, msg));
}

[[noreturn]] void invalid(const std::string& key, const std::string& msg) {
    throw ConfigError(ErrorKind::ValidationError, key, 0, fmt::format("{}: {}", key, msg));
}

double to_double(const std::string& key, int line, std::string_view text) {
    const std::string s(trim(text));
    if (s.empty()) parse_fail(key, line, fmt::format("empty value for '{}'", key));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) {
        parse_fail(key, line, fmt::format("'{}' is not a finite number (key '{}')", s, key));
    }
    return v;
}

long long to_integer(const std::string& key, int line, std::string_view text) {
    const double v = to_double(key, line, text);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
        parse_fail(key, line, fmt::format("'{}' expects an integer", key));
    }
    return static_cast<long long>(v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<double> to_list(const std::string& key, int line, std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(to_double(key, line, part));
    return out;
}

bool to_bool(const std::string& key, int line, std::string_view text) {
    const auto s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    parse_fail(key, line, fmt::format("'{}' expects true/false", key));
}

std::size_t positive_size(const std::string& key, int line, std::string_view text) {
    const long long v = to_integer(key, line, text);
    if (v < 1) invalid(key, "must be a positive integer");
    return static_cast<std::size_t>(v);
}

using Setter = std::function<void(RunConfig&, const std::string&, int, std::string_view)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"dim", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.dim = static_cast<int>(to_integer(k, l, v));
         }},
        {"extent", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.extent = to_double(k, l, v); }},
        {"cells", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             const long long n = to_integer(k, l, v);
             if (n < 3) invalid(k, "needs at least 3 cells per axis");
             c.cells = static_cast<std::size_t>(n);
         }},
        {"chi", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.params.chi = to_double(k, l, v); }},
        {"eps", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.params.eps = to_double(k, l, v); }},
        {"initial", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             static const std::map<std::string, InitialKind, std::less<>> kinds = {
                 {"single_peak", InitialKind::SinglePeak}, {"multi_peak", InitialKind::MultiPeak},
                 {"factorized", InitialKind::Factorized},  {"gaussian", InitialKind::Gaussian},
                 {"spike", InitialKind::Spike},            {"uniform", InitialKind::Uniform},
                 {"snapshot", InitialKind::Snapshot}};
             const auto it = kinds.find(trim(v));
             if (it == kinds.end()) parse_fail(k, l, fmt::format("unknown initial kind '{}'", trim(v)));
             c.initial.kind = it->second;
         }},
        {"amplitude", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.initial.amplitude = to_double(k, l, v);
         }},
        {"center", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             const auto xs = to_list(k, l, v);
             if (xs.size() > 2) invalid(k, "at most two coordinates");
             c.initial.center = {xs[0], xs.size() > 1 ? xs[1] : 0.0};
         }},
        {"width", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.initial.width = to_double(k, l, v); }},
        {"mass", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.initial.mass = to_double(k, l, v); }},
        {"peaks", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             // amplitude@center, amplitude@center, ...
             c.initial.peaks.clear();
             for (auto item : split(v, ',')) {
                 const auto at = item.find('@');
                 if (at == std::string_view::npos) parse_fail(k, l, "peaks expects 'amplitude@center' items");
                 Peak p;
                 p.amplitude = to_double(k, l, item.substr(0, at));
                 p.center = {to_double(k, l, item.substr(at + 1)), 0.0};
                 c.initial.peaks.push_back(p);
             }
         }},
        {"snap_center", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.initial.snap_center = to_bool(k, l, v);
         }},
        {"spike_p", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.initial.spike_p = to_double(k, l, v); }},
        {"spike_norm", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.initial.spike_norm = to_double(k, l, v);
         }},
        {"noise", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.initial.noise = to_double(k, l, v); }},
        {"snapshot", [](RunConfig& c, const std::string&, int, std::string_view v) {
             c.initial.snapshot_path = std::string(trim(v));
         }},
        {"scheme", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             const auto s = trim(v);
             if (s == "explicit") c.controls.scheme = Scheme::Explicit;
             else if (s == "semi_implicit") c.controls.scheme = Scheme::SemiImplicit;
             else parse_fail(k, l, fmt::format("unknown scheme '{}'", s));
         }},
        {"dt", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.controls.dt = to_double(k, l, v); }},
        {"cfl_safety", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.controls.cfl_safety = to_double(k, l, v);
         }},
        {"picard_tol", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.controls.picard_tol = to_double(k, l, v);
         }},
        {"picard_max_iter", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.controls.picard_max_iter = static_cast<int>(positive_size(k, l, v));
         }},
        {"linear_solver_tol", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.controls.linear_solver_tol = to_double(k, l, v);
         }},
        {"t_end", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.t_end = to_double(k, l, v); }},
        {"diag_stride", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.diag_stride = positive_size(k, l, v);
         }},
        {"snapshot_stride", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             const long long n = to_integer(k, l, v);
             if (n < 0) invalid(k, "must be >= 0");
             c.snapshot_stride = static_cast<std::size_t>(n);
         }},
        {"p_set", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.p_set = to_list(k, l, v); }},
        {"seed", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             const long long n = to_integer(k, l, v);
             if (n < 0) invalid(k, "must be >= 0");
             c.seed = static_cast<std::uint64_t>(n);
         }},
        {"eps_list", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.eps_list = to_list(k, l, v); }},
        {"sigma", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.sigma = to_double(k, l, v); }},
        {"shift", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.shift = to_double(k, l, v); }},
        {"spike_widths", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.spike_widths = to_list(k, l, v);
         }},
        {"probes", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.probes = positive_size(k, l, v); }},
        {"probe_min", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.probe_min = to_double(k, l, v); }},
        {"heat_probe_factor", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.heat_probe_factor = to_double(k, l, v);
         }},
        {"samples", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.samples = positive_size(k, l, v); }},
        {"dims", [](RunConfig& c, const std::string& k, int l, std::string_view v) {
             c.dims.clear();
             for (double d : to_list(k, l, v)) {
                 if (d != std::floor(d) || d < 1) invalid(k, "dimensions must be positive integers");
                 c.dims.push_back(static_cast<int>(d));
             }
         }},
        {"c_list", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.c_list = to_list(k, l, v); }},
        {"t_probe", [](RunConfig& c, const std::string& k, int l, std::string_view v) { c.t_probe = to_double(k, l, v); }},
    };
    return table;
}

void validate(const RunConfig& c) {
    if (c.dim < 1 || c.dim > 2) invalid("dim", "must be 1 or 2");
    if (!(c.extent > 0.0)) invalid("extent", "must be > 0");
    if (!(c.params.chi >= 0.0)) invalid("chi", "must be >= 0");
    if (!(c.params.eps >= 0.0)) invalid("eps", "must be >= 0");
    if (!(c.initial.width > 0.0)) invalid("width", "must be > 0");
    if (!(c.initial.amplitude > 0.0) && c.initial.kind != InitialKind::Uniform) invalid("amplitude", "must be > 0");
    if (c.initial.kind == InitialKind::Uniform && !(c.initial.amplitude >= 0.0)) invalid("amplitude", "must be >= 0");
    if (c.initial.mass && !(*c.initial.mass > 0.0)) invalid("mass", "must be > 0");
    if (c.initial.kind == InitialKind::MultiPeak) {
        if (c.dim != 1) invalid("initial", "multi_peak requires dim = 1");
        if (c.initial.peaks.empty()) invalid("peaks", "multi_peak requires at least one peak");
    }
    if (c.initial.kind == InitialKind::Snapshot && c.initial.snapshot_path.empty()) {
        invalid("snapshot", "initial = snapshot requires a snapshot path");
    }
    if (!(c.initial.spike_p >= 1.0)) invalid("spike_p", "must be >= 1");
    if (!(c.initial.spike_norm > 0.0)) invalid("spike_norm", "must be > 0");
    if (!(c.initial.noise >= 0.0) || c.initial.noise >= 1.0) invalid("noise", "must be in [0, 1)");
    if (c.controls.dt < 0.0) invalid("dt", "must be > 0");
    if (!(c.controls.cfl_safety > 0.0) || c.controls.cfl_safety > 1.0) invalid("cfl_safety", "must be in (0, 1]");
    if (!(c.controls.picard_tol > 0.0)) invalid("picard_tol", "must be > 0");
    if (!(c.controls.linear_solver_tol > 0.0)) invalid("linear_solver_tol", "must be > 0");
    if (!(c.t_end >= 0.0)) invalid("t_end", "must be >= 0");
    for (double p : c.p_set) {
        if (!(p >= 1.0)) invalid("p_set", "exponents must be >= 1");
    }
    for (double e : c.eps_list) {
        if (!(e >= 0.0)) invalid("eps_list", "viscosities must be >= 0");
    }
    if (c.sigma && !(*c.sigma >= 0.0)) invalid("sigma", "must be >= 0");
    for (double w : c.spike_widths) {
        if (!(w > 0.0)) invalid("spike_widths", "widths must be > 0");
    }
    if (!(c.probe_min > 0.0)) invalid("probe_min", "must be > 0");
    if (!(c.heat_probe_factor > 0.0)) invalid("heat_probe_factor", "must be > 0");
    for (double cc : c.c_list) {
        if (!(cc >= 0.0)) invalid("c_list", "constants must be >= 0");
    }
    if (!(c.t_probe > 0.0)) invalid("t_probe", "must be > 0");
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, setter] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) parse_fail("", line_no, fmt::format("expected 'key = value', got '{}'", line));
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail("", line_no, "missing key");

        const auto& table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) parse_fail(key, line_no, fmt::format("unknown key '{}'", key));
        if (!seen.insert(key).second) parse_fail(key, line_no, fmt::format("duplicate key '{}'", key));
        it->second(cfg, key, line_no, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ErrorKind::Io, "", 0, fmt::format("cannot read config '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Grid make_config_grid(const RunConfig& cfg) { return make_grid(cfg.dim, cfg.extent, cfg.cells); }

Field polynomial_spike(const Grid& grid, std::array<double, Grid::kMaxDim> center, double width, double p,
                       double norm) {
    Field rho(grid);
    for (std::size_t c = 0; c < rho.size(); ++c) {
        const auto idx = grid.multi_index(c);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double dx = grid.center(a, idx[a]) - center[a];
            r2 += dx * dx;
        }
        const double s = std::max(0.0, 1.0 - r2 / (width * width));
        rho[c] = s * s;
    }
    const double current = std::pow(integrate_power(rho, p), 1.0 / p);
    if (!(current > 0.0)) throw Error(ErrorKind::InvalidArgument, "spike is not resolved by the grid");
    const double scale = norm / current;
    for (std::size_t c = 0; c < rho.size(); ++c) rho[c] *= scale;
    return rho;
}

namespace {

// splitmix64 -> double in [0, 1); identical on every platform.
double unit_uniform(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

Field make_initial(const RunConfig& cfg) {
    const InitialSpec& in = cfg.initial;
    if (in.kind == InitialKind::Snapshot) {
        Field rho = load_snapshot(in.snapshot_path);
        require_density(rho, "snapshot initial data");
        return rho;
    }
    const Grid grid = make_config_grid(cfg);
    Field rho(grid);
    auto center = in.center;

    switch (in.kind) {
        case InitialKind::SinglePeak:
        case InitialKind::MultiPeak:
        case InitialKind::Factorized: {
            SteadyProfileSpec spec;
            spec.kind = in.kind == InitialKind::SinglePeak   ? ProfileKind::SinglePeak
                        : in.kind == InitialKind::MultiPeak ? ProfileKind::MultiPeak
                                                            : ProfileKind::Factorized;
            spec.chi = cfg.params.chi;
            if (in.kind == InitialKind::MultiPeak) {
                spec.peaks = in.peaks;
            } else {
                spec.peaks = {Peak{in.amplitude, center}};
            }
            if (in.snap_center) {
                for (auto& p : spec.peaks) p.center = snap_to_cell_center(grid, p.center);
            }
            spec.target_mass = in.mass;
            rho = sample(spec, grid);
            break;
        }
        case InitialKind::Gaussian: {
            for (std::size_t c = 0; c < rho.size(); ++c) {
                const auto idx = grid.multi_index(c);
                double r2 = 0.0;
                for (int a = 0; a < grid.dim(); ++a) {
                    const double dx = grid.center(a, idx[a]) - center[a];
                    r2 += dx * dx;
                }
                rho[c] = in.amplitude * std::exp(-r2 / (2.0 * in.width * in.width));
            }
            break;
        }
        case InitialKind::Spike:
            rho = polynomial_spike(grid, center, in.width, in.spike_p, in.spike_norm);
            break;
        case InitialKind::Uniform:
            for (std::size_t c = 0; c < rho.size(); ++c) rho[c] = in.amplitude;
            break;
        case InitialKind::Snapshot:
            break;
    }

    if (in.noise > 0.0) {
        std::uint64_t state = cfg.seed;
        for (std::size_t c = 0; c < rho.size(); ++c) rho[c] *= 1.0 + in.noise * (2.0 * unit_uniform(state) - 1.0);
    }
    const bool steady = in.kind == InitialKind::SinglePeak || in.kind == InitialKind::MultiPeak ||
                        in.kind == InitialKind::Factorized;
    if (in.mass && (!steady || in.noise > 0.0)) {
        const double scale = *in.mass / integrate(rho);
        for (std::size_t c = 0; c < rho.size(); ++c) rho[c] *= scale;
    }
    require_density(rho, "initial data");
    return rho;
}

StepControls resolve_controls(const RunConfig& cfg, const Grid& grid, double eps) {
    StepControls sc = cfg.controls;
    if (sc.dt == 0.0) sc.dt = cfl_dt(grid, eps, sc.cfl_safety);
    return sc;
}

}  // namespace fld
