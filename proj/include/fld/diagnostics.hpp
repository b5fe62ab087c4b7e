#pragma once

#include "fld/grid.hpp"

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fld {

// One time-stamped row of tracked functionals. lp_norms and grad_lp are
// norms (not powers) keyed by p.
struct DiagnosticsRecord {
    double time = 0.0;
    double mass = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    std::map<double, double> lp_norms;
    double sup_norm = 0.0;
    double second_moment = 0.0;  // integral of rho (1 + |x|^2)
    double entropy = 0.0;        // integral of rho log rho
    double entropy_abs = 0.0;    // integral of rho |log rho|
    double fisher = 0.0;         // integral of |grad rho|^2 / rho
    std::map<double, double> grad_lp;
};

/// All functionals by midpoint quadrature, with rho log rho = 0 and
/// |grad rho|^2 / rho = 0 on vacuum cells. Gradients are cell-centered.
DiagnosticsRecord record(const Field& rho, std::span<const double> p_set, double time = 0.0);

/// Integral of (u+s) log((u+s)/(v+s)) - u + v.
/// With sigma = 0, cells where v = 0 < u raise SupportMismatch.
double relative_entropy(const Field& u, const Field& v, double sigma = 0.0);

struct Dissipation {
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Dissipation integrals of the relative entropy between two solutions:
///   D1 = 1/2 int u (a_u - a_v)^2
///   D2 = 1/2 int u |grad log(u/v)|^2 (a_u + a_v)
/// where a is the limiter coefficient. Cells with u = 0 or v = 0 contribute 0.
Dissipation dissipation_terms(const Field& u, const Field& v, double chi);

double l1_distance(const Field& u, const Field& v);

// CSV: time,mass,l1,l2,lp_<p>...,sup,moment2,entropy,entropy_abs,fisher,gradlp_<p>...
std::string csv_header(std::span<const double> p_set);
std::string csv_row(const DiagnosticsRecord& rec, std::span<const double> p_set);
void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> records, std::span<const double> p_set);

// Compact label for p in column names: 4 -> "4", 2.5 -> "2.5".
std::string p_label(double p);

}  // namespace fld
