// Command-line driver for the flux-limited diffusion solver and its studies.
//
//   fld_cli simulate            --config run.cfg --out out/
//   fld_cli study viscosity     --config run.cfg --out out/ [--threads N]
//   fld_cli study contraction   --config a.cfg [--config2 b.cfg] --out out/
//   fld_cli study smoothing     --config run.cfg --out out/ [--threads N]
//   fld_cli check monotonicity  [--config run.cfg] --out out/ [--seed N]
//   fld_cli steady check        --config run.cfg --out out/
//
// Exit codes: 0 all verdicts pass, 1 config error, 2 numerical failure,
// 3 verdict failure.

#include "fld/config.hpp"
#include "fld/error.hpp"
#include "fld/studies.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerdict = 3;

int exit_code_for(fld::ErrorKind kind) {
    switch (kind) {
        case fld::ErrorKind::ParseError:
        case fld::ErrorKind::ValidationError:
        case fld::ErrorKind::InvalidDimension:
        case fld::ErrorKind::InvalidExtent:
        case fld::ErrorKind::InvalidArgument:
        case fld::ErrorKind::GridMismatch:
        case fld::ErrorKind::SpecGridMismatch:
        case fld::ErrorKind::Io:
            return kExitConfig;
        case fld::ErrorKind::CflViolation:
        case fld::ErrorKind::NumericalFailure:
        case fld::ErrorKind::PicardDivergence:
        case fld::ErrorKind::SupportMismatch:
            return kExitNumerical;
    }
    return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flux-limited degenerate diffusion: solver and study harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string config2_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("--config", config_path, "key = value configuration file");
        if (config_required) opt->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--threads", threads, "worker threads for independent runs")->check(CLI::PositiveNumber);
    };

    auto* simulate_cmd = app.add_subcommand("simulate", "run one trajectory and write diagnostics");
    add_common(simulate_cmd, true);

    auto* study_cmd = app.add_subcommand("study", "run a study harness");
    study_cmd->require_subcommand(1);
    auto* viscosity_cmd = study_cmd->add_subcommand("viscosity", "vanishing-viscosity Cauchy study");
    add_common(viscosity_cmd, true);
    auto* contraction_cmd = study_cmd->add_subcommand("contraction", "relative-entropy contraction study");
    add_common(contraction_cmd, true);
    contraction_cmd->add_option("--config2", config2_path, "second run (default: first run shifted by `shift`)");
    auto* smoothing_cmd = study_cmd->add_subcommand("smoothing", "L-infinity smoothing envelope study");
    add_common(smoothing_cmd, true);

    auto* check_cmd = app.add_subcommand("check", "operator checks");
    check_cmd->require_subcommand(1);
    auto* mono_cmd = check_cmd->add_subcommand("monotonicity", "random-pair monotonicity test");
    add_common(mono_cmd, false);

    auto* steady_cmd = app.add_subcommand("steady", "steady-state checks");
    steady_cmd->require_subcommand(1);
    auto* steady_check_cmd = steady_cmd->add_subcommand("check", "eikonal residual and stationarity drift");
    add_common(steady_check_cmd, true);

    CLI11_PARSE(app, argc, argv);

    fld::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = fld::load_config(config_path);
        if (seed) cfg.seed = *seed;
    } catch (const fld::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        fld::StudyReport report;
        std::string stem;
        if (*simulate_cmd) {
            report = fld::simulate(cfg, out_dir);
            stem = "simulate";
        } else if (*viscosity_cmd) {
            report = fld::viscosity_study(cfg, cfg.eps_list, threads);
            stem = "viscosity";
        } else if (*contraction_cmd) {
            fld::RunConfig cfg2 = config2_path.empty() ? fld::shifted_config(cfg) : fld::load_config(config2_path);
            report = fld::contraction_study(cfg, cfg2);
            stem = "contraction";
        } else if (*smoothing_cmd) {
            report = fld::smoothing_study(cfg, cfg.initial.spike_p, cfg.spike_widths, threads);
            stem = "smoothing";
        } else if (*mono_cmd) {
            report = fld::monotonicity_test(cfg.samples, cfg.dims, cfg.c_list, cfg.seed);
            stem = "monotonicity";
        } else if (*steady_check_cmd) {
            report = fld::steady_check(cfg);
            stem = "steady";
        }
        fld::write_report(report, out_dir, stem);
        std::cout << report.text();
        return report.all_passed() ? kExitOk : kExitVerdict;
    } catch (const fld::Error& e) {
        std::cerr << fld::to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
