#include "fld/diagnostics.hpp"

#include "fld/error.hpp"
#include "fld/flux_limiter.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace fld {

namespace {

void require_same_grid(const Field& u, const Field& v, const char* where) {
    if (!(u.grid() == v.grid())) throw Error(ErrorKind::GridMismatch, fmt::format("{}: grids differ", where));
}

double grad_norm_sq(const std::array<std::vector<double>, Grid::kMaxDim>& grad, int dim, std::size_t c) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += grad[a][c] * grad[a][c];
    return s;
}

}  // namespace

DiagnosticsRecord record(const Field& rho, std::span<const double> p_set, double time) {
    const Grid& g = rho.grid();
    const int d = g.dim();
    const double vol = g.cell_volume();
    const auto grad = cell_gradient(rho);

    DiagnosticsRecord rec;
    rec.time = time;

    double mass = 0.0, l1 = 0.0, l2 = 0.0, sup = 0.0, moment = 0.0;
    double ent = 0.0, ent_abs = 0.0, fisher = 0.0;
    std::vector<double> lp(p_set.size(), 0.0);
    std::vector<double> glp(p_set.size(), 0.0);

    for (std::size_t c = 0; c < rho.size(); ++c) {
        const double r = rho[c];
        const double gsq = grad_norm_sq(grad, d, c);
        mass += r;
        l1 += std::abs(r);
        l2 += r * r;
        sup = std::max(sup, std::abs(r));
        moment += r * (1.0 + g.center_norm_sq(c));
        if (r > 0.0) {
            const double rl = r * std::log(r);
            ent += rl;
            ent_abs += std::abs(rl);
            fisher += gsq / r;
        }
        const double gn = std::sqrt(gsq);
        for (std::size_t k = 0; k < p_set.size(); ++k) {
            lp[k] += std::pow(std::abs(r), p_set[k]);
            glp[k] += std::pow(gn, p_set[k]);
        }
    }

    rec.mass = mass * vol;
    rec.l1 = l1 * vol;
    rec.l2 = std::sqrt(l2 * vol);
    rec.sup_norm = sup;
    rec.second_moment = moment * vol;
    rec.entropy = ent * vol;
    rec.entropy_abs = ent_abs * vol;
    rec.fisher = fisher * vol;
    for (std::size_t k = 0; k < p_set.size(); ++k) {
        rec.lp_norms[p_set[k]] = std::pow(lp[k] * vol, 1.0 / p_set[k]);
        rec.grad_lp[p_set[k]] = std::pow(glp[k] * vol, 1.0 / p_set[k]);
    }
    return rec;
}

double relative_entropy(const Field& u, const Field& v, double sigma) {
    require_same_grid(u, v, "relative_entropy");
    if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "relative_entropy: sigma must be >= 0");
    double sum = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        const double a = u[c] + sigma;
        const double b = v[c] + sigma;
        double term = -u[c] + v[c];
        if (a > 0.0) {
            if (b <= 0.0) {
                throw Error(ErrorKind::SupportMismatch,
                            fmt::format("relative_entropy: u > 0 where v = 0 (cell {})", c));
            }
            term += a * std::log(a / b);
        }
        sum += term;
    }
    return sum * u.grid().cell_volume();
}

Dissipation dissipation_terms(const Field& u, const Field& v, double chi) {
    require_same_grid(u, v, "dissipation_terms");
    const Grid& g = u.grid();
    const int d = g.dim();
    const auto gu = cell_gradient(u);
    const auto gv = cell_gradient(v);

    double d1 = 0.0, d2 = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!(u[c] > 0.0) || !(v[c] > 0.0)) continue;
        const double au = limiter(u[c], std::sqrt(grad_norm_sq(gu, d, c)), chi);
        const double av = limiter(v[c], std::sqrt(grad_norm_sq(gv, d, c)), chi);
        const double da = au - av;
        d1 += u[c] * da * da;
        double glog = 0.0;
        for (int a = 0; a < d; ++a) {
            const double w = gu[a][c] / u[c] - gv[a][c] / v[c];
            glog += w * w;
        }
        d2 += u[c] * glog * (au + av);
    }
    const double vol = g.cell_volume();
    return {0.5 * d1 * vol, 0.5 * d2 * vol};
}

double l1_distance(const Field& u, const Field& v) {
    require_same_grid(u, v, "l1_distance");
    double sum = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) sum += std::abs(u[c] - v[c]);
    return sum * u.grid().cell_volume();
}

std::string p_label(double p) { return fmt::format("{}", p); }

std::string csv_header(std::span<const double> p_set) {
    std::string h = "time,mass,l1,l2";
    for (double p : p_set) h += ",lp_" + p_label(p);
    h += ",sup,moment2,entropy,entropy_abs,fisher";
    for (double p : p_set) h += ",gradlp_" + p_label(p);
    return h;
}

std::string csv_row(const DiagnosticsRecord& rec, std::span<const double> p_set) {
    std::string row = fmt::format("{},{},{},{}", rec.time, rec.mass, rec.l1, rec.l2);
    for (double p : p_set) row += fmt::format(",{}", rec.lp_norms.at(p));
    row += fmt::format(",{},{},{},{},{}", rec.sup_norm, rec.second_moment, rec.entropy, rec.entropy_abs,
                       rec.fisher);
    for (double p : p_set) row += fmt::format(",{}", rec.grad_lp.at(p));
    return row;
}

void write_csv(std::ostream& out, std::span<const DiagnosticsRecord> records, std::span<const double> p_set) {
    out << csv_header(p_set) << '\n';
    for (const auto& r : records) out << csv_row(r, p_set) << '\n';
}

}  // namespace fld
