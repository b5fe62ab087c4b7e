#pragma once

#include "fld/config.hpp"
#include "fld/diagnostics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fld {

struct Verdict {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Outcome of one harness: an input description, a numeric result table and
/// named verdicts. text() is the human report; csv() is the table.
struct StudyReport {
    std::string kind;
    std::vector<std::string> inputs;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> notes;  // derived scalars (fits, envelopes)
    std::vector<Verdict> verdicts;

    bool all_passed() const;
    const Verdict* find(const std::string& name) const;
    std::string text() const;
    std::string csv() const;
};

/// Writes <stem>_report.txt and <stem>.csv into dir.
void write_report(const StudyReport& report, const std::string& dir, const std::string& stem);

/// Run the configured simulation; writes diagnostics.csv, final.snap and
/// snap_<step>.snap (when snapshot_stride > 0) into out_dir.
StudyReport simulate(const RunConfig& cfg, const std::string& out_dir);

/// Runs one trajectory per viscosity and compares consecutive pairs at t_end.
StudyReport viscosity_study(const RunConfig& base, const std::vector<double>& eps_list, unsigned threads = 1);

/// Lockstep eps = 0 runs; relative entropy and its dissipation terms over time.
StudyReport contraction_study(const RunConfig& cfg1, const RunConfig& cfg2);

/// cfg with the initial center shifted by cfg.shift along axis 0.
RunConfig shifted_config(const RunConfig& cfg);

/// Sup-norm envelope of an equal-L^p spike family, plus a chi = 0 heat control.
StudyReport smoothing_study(const RunConfig& base, double p, const std::vector<double>& spike_widths,
                            unsigned threads = 1);

/// Seeded random pairs for the clamped and unclamped operators.
StudyReport monotonicity_test(std::size_t samples, const std::vector<int>& dims, const std::vector<double>& c_list,
                              std::uint64_t seed);

/// Eikonal residual and stationarity drift of a steady profile at h and h/2.
StudyReport steady_check(const RunConfig& cfg);

// Building blocks shared with the acceptance suite.

/// Advance from t to t + duration with fixed dt, last step shortened.
Field advance(const Field& rho, const Params& params, const StepControls& controls, double duration);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
double fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

/// sigma used by the studies when the config leaves it unset.
double default_sigma(const Field& v);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);

}  // namespace fld
