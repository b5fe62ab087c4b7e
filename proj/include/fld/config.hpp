#pragma once

#include "fld/error.hpp"
#include "fld/flux_limiter.hpp"
#include "fld/grid.hpp"
#include "fld/steady_states.hpp"
#include "fld/time_integration.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fld {

class ConfigError : public Error {
public:
    ConfigError(ErrorKind kind, std::string key, int line, const std::string& what)
        : Error(kind, what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }  // 0 when not tied to a line

private:
    std::string key_;
    int line_;
};

enum class InitialKind { SinglePeak, MultiPeak, Factorized, Gaussian, Spike, Uniform, Snapshot };

struct InitialSpec {
    InitialKind kind = InitialKind::Gaussian;
    double amplitude = 1.0;
    std::array<double, Grid::kMaxDim> center{0.0, 0.0};
    double width = 1.0;                 // Gaussian std-dev or spike radius
    std::optional<double> mass;         // rescale to this discrete mass
    std::vector<Peak> peaks;            // multi_peak only
    bool snap_center = true;            // steady profiles: kink on a cell center
    double spike_p = 4.0;               // spike normalization exponent
    double spike_norm = 1.0;            // target ||rho||_p of a spike
    double noise = 0.0;                 // seeded multiplicative perturbation in [-noise, noise]
    std::string snapshot_path;
};

struct RunConfig {
    int dim = 1;
    double extent = 5.0;
    std::size_t cells = 200;
    Params params;
    InitialSpec initial;
    StepControls controls;  // controls.dt == 0 means "use cfl_dt with cfl_safety"
    double t_end = 1.0;
    std::size_t diag_stride = 10;
    std::size_t snapshot_stride = 0;
    std::vector<double> p_set{4.0};
    std::uint64_t seed = 0;

    // Study inputs.
    std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0};
    std::optional<double> sigma;  // relative-entropy regularization; default 1e-12 sup(v)
    double shift = 0.5;           // contraction: second run's center offset on axis 0
    std::vector<double> spike_widths{0.4, 0.2, 0.1};
    std::size_t probes = 24;
    double probe_min = 1e-4;
    double heat_probe_factor = 1.0;  // heat control probes at t = factor * w^2
    std::size_t samples = 100000;
    std::vector<int> dims{1, 2, 3};
    std::vector<double> c_list{0.1, 1.0, 10.0};
    double t_probe = 0.1;  // steady check horizon
};

/// Parse `key = value` lines; `#` starts a comment. Unknown or duplicate keys
/// are parse errors (with line number); bad values are validation errors
/// naming the key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Every accepted key, in documentation order.
const std::vector<std::string>& config_keys();

Grid make_config_grid(const RunConfig& cfg);

/// Initial density described by the config, on its grid (or the snapshot's).
Field make_initial(const RunConfig& cfg);

/// controls.dt, or cfl_dt(grid, eps, cfl_safety) when unset.
StepControls resolve_controls(const RunConfig& cfg, const Grid& grid, double eps);

/// Compactly supported bump (1 - |x - c|^2 / w^2)_+^2 scaled to ||.||_p = norm.
Field polynomial_spike(const Grid& grid, std::array<double, Grid::kMaxDim> center, double width, double p,
                       double norm);

}  // namespace fld
