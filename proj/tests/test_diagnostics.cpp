#include <doctest.h>

#include "fld/diagnostics.hpp"
#include "fld/error.hpp"
#include "fld/steady_states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace fld;

namespace {

Field filled(const Grid& g, double value) {
    Field out(g);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = value;
    return out;
}

Field random_positive(const Grid& g, std::mt19937_64& rng, double lo = 0.05, double hi = 3.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Field out(g);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = u(rng);
    return out;
}

Field normal_density(const Grid& g, double variance) {
    Field out(g);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double x = g.center(0, c);
        out[c] = std::exp(-x * x / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
    }
    return out;
}

const std::vector<double> kP{2.0, 4.0};

}  // namespace

TEST_CASE("record of the unit constant") {
    for (int dim : {1, 2}) {
        const Grid g = make_grid(dim, 0.5, 10);
        const DiagnosticsRecord r = record(filled(g, 1.0), kP, 0.25);
        CHECK(r.time == 0.25);
        CHECK(r.mass == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.l1 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.l2 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.lp_norms.at(4.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(r.sup_norm == 1.0);
        CHECK(r.entropy == 0.0);
        CHECK(r.entropy_abs == 0.0);
        CHECK(r.fisher == 0.0);
        CHECK(r.grad_lp.at(2.0) == 0.0);
    }
}

TEST_CASE("fisher of the steady peak tends to chi^2 mass at first order") {
    double prev_err = 0.0;
    for (std::size_t n : {200u, 400u, 800u}) {
        const Grid g = make_grid(1, 10.0, n);
        SteadyProfileSpec spec;
        spec.target_mass = 1.0;
        const double err = std::abs(record(sample(spec, g), kP).fisher - 1.0);
        CHECK(err < 0.1);
        if (prev_err > 0.0) CHECK(err < 0.6 * prev_err);
        prev_err = err;
    }
}

TEST_CASE("second moment of the two-sided exponential") {
    const Grid g = make_grid(1, 20.0, 4000);
    Field rho(g);
    for (std::size_t c = 0; c < rho.size(); ++c) rho[c] = 0.5 * std::exp(-std::abs(g.center(0, c)));
    const DiagnosticsRecord r = record(rho, kP);
    CHECK(r.mass == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(r.second_moment == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("record functionals are nonnegative and entropy_abs dominates |entropy| (property)") {
    std::mt19937_64 rng(11);
    for (int dim : {1, 2}) {
        const Grid g = make_grid(dim, 2.0, dim == 1 ? 50 : 12);
        for (int trial = 0; trial < 50; ++trial) {
            Field rho = random_positive(g, rng, 0.0, 2.0);
            rho[trial % rho.size()] = 0.0;
            const DiagnosticsRecord r = record(rho, kP);
            CHECK(r.mass >= 0.0);
            CHECK(r.sup_norm >= 0.0);
            CHECK(r.second_moment >= 0.0);
            CHECK(r.fisher >= 0.0);
            CHECK(r.entropy_abs >= 0.0);
            CHECK(r.entropy_abs >= std::abs(r.entropy) * (1.0 - 1e-14));
            for (const auto& [p, v] : r.lp_norms) CHECK(v >= 0.0);
            for (const auto& [p, v] : r.grad_lp) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("record is invariant under translation and reflection of the data") {
    std::mt19937_64 rng(23);
    const Grid g = make_grid(1, 3.0, 60);
    Field rho(g), shifted(g), reflected(g);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    // Zero padding keeps the support away from the walls after the shift.
    for (std::size_t c = 10; c < 40; ++c) rho[c] = u(rng);
    for (std::size_t c = 0; c < 60; ++c) {
        shifted[c] = c >= 7 ? rho[c - 7] : 0.0;
        reflected[c] = rho[59 - c];
    }
    const DiagnosticsRecord a = record(rho, kP);
    const DiagnosticsRecord b = record(shifted, kP);
    const DiagnosticsRecord r = record(reflected, kP);
    for (const DiagnosticsRecord* other : {&b, &r}) {
        CHECK(other->mass == doctest::Approx(a.mass).epsilon(1e-13));
        CHECK(other->l2 == doctest::Approx(a.l2).epsilon(1e-13));
        CHECK(other->lp_norms.at(4.0) == doctest::Approx(a.lp_norms.at(4.0)).epsilon(1e-13));
        CHECK(other->sup_norm == a.sup_norm);
        CHECK(other->entropy == doctest::Approx(a.entropy).epsilon(1e-13));
        CHECK(other->entropy_abs == doctest::Approx(a.entropy_abs).epsilon(1e-13));
        CHECK(other->fisher == doctest::Approx(a.fisher).epsilon(1e-13));
        CHECK(other->grad_lp.at(2.0) == doctest::Approx(a.grad_lp.at(2.0)).epsilon(1e-13));
    }
    // The moment weight is even, so only reflection preserves it.
    CHECK(r.second_moment == doctest::Approx(a.second_moment).epsilon(1e-13));
}

TEST_CASE("relative entropy examples") {
    const Grid g = make_grid(1, 0.5, 8);
    CHECK(relative_entropy(filled(g, 2.0), filled(g, 2.0)) == 0.0);
    CHECK(relative_entropy(filled(g, 2.0), filled(g, 1.0)) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-13));
    CHECK(2.0 * std::log(2.0) - 1.0 == doctest::Approx(0.386294).epsilon(1e-6));

    Field u = filled(g, 1.0), v = filled(g, 1.0);
    v[3] = 0.0;
    try {
        relative_entropy(u, v, 0.0);
        FAIL("expected support mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SupportMismatch);
    }
    CHECK(relative_entropy(u, v, 1e-6) > 0.0);
    // u = 0 where v > 0 is fine: the integrand is v there.
    CHECK(relative_entropy(v, u, 0.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
}

TEST_CASE("relative entropy is nonnegative and bounds the L1 distance (property)") {
    std::mt19937_64 rng(29);
    const Grid g = make_grid(1, 2.0, 40);
    for (int trial = 0; trial < 1000; ++trial) {
        const Field u = random_positive(g, rng);
        Field v = random_positive(g, rng);
        CHECK(relative_entropy(u, v) >= -1e-12);
        const double scale = integrate(u) / integrate(v);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] *= scale;
        const double l1 = l1_distance(u, v);
        CHECK(l1 * l1 <= 2.0 * relative_entropy(u, v) * integrate(u) * (1.0 + 1e-12));
    }
}

TEST_CASE("dissipation terms") {
    std::mt19937_64 rng(31);
    const Grid g = make_grid(1, 5.0, 200);
    const Field u = random_positive(g, rng);
    const Dissipation same = dissipation_terms(u, u, 1.0);
    CHECK(same.d1 == 0.0);
    CHECK(same.d2 == 0.0);

    Field a(g), b(g);
    for (std::size_t c = 0; c < a.size(); ++c) {
        a[c] = std::exp(-0.5 * std::abs(g.center(0, c)));
        b[c] = 2.0 * std::exp(-0.3 * std::abs(g.center(0, c) - 1.0));
    }
    const Dissipation sub = dissipation_terms(a, b, 1.0);
    CHECK(sub.d1 == 0.0);
    CHECK(sub.d2 == 0.0);

    for (int trial = 0; trial < 100; ++trial) {
        const Dissipation d = dissipation_terms(random_positive(g, rng), random_positive(g, rng), 0.5);
        CHECK(d.d1 >= 0.0);
        CHECK(d.d2 >= 0.0);
    }
}

TEST_CASE("dissipation between a peak and its shift vanishes at second order") {
    // Both limiters are zero in the continuum; the discrete values come from
    // the centered stencil and shrink like h^2.
    double prev = 0.0;
    for (std::size_t n : {200u, 400u, 800u}) {
        const Grid g = make_grid(1, 5.0, n);
        SteadyProfileSpec a;
        a.target_mass = 1.0;
        SteadyProfileSpec b = a;
        b.peaks[0].center[0] = 0.5;
        const Dissipation d = dissipation_terms(sample(a, g), sample(b, g), 1.0);
        CHECK(d.d1 > 0.0);
        CHECK(d.d2 > 0.0);
        if (prev > 0.0) CHECK(prev / d.d2 == doctest::Approx(4.0).epsilon(0.1));
        prev = d.d2;
    }
}

TEST_CASE("dissipation regression constants for a peak against a Gaussian") {
    auto terms = [](std::size_t n) {
        const Grid g = make_grid(1, 5.0, n);
        SteadyProfileSpec a;
        a.target_mass = 1.0;
        return dissipation_terms(sample(a, g), normal_density(g, 0.25), 1.0);
    };
    const Dissipation coarse = terms(400), fine = terms(800);
    const double d1 = fine.d1 + (fine.d1 - coarse.d1) / 3.0;
    const double d2 = fine.d2 + (fine.d2 - coarse.d2) / 3.0;
    CHECK(d1 == doctest::Approx(0.1912465).epsilon(1e-5));
    CHECK(d2 == doctest::Approx(9.4639).epsilon(3e-4));
}

TEST_CASE("l1 distance examples") {
    const Grid g = make_grid(1, 5.0, 20);
    CHECK(l1_distance(filled(g, 1.0), filled(g, 0.0)) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(l1_distance(filled(g, 0.7), filled(g, 0.7)) == 0.0);
}

TEST_CASE("csv layout") {
    CHECK(p_label(4.0) == "4");
    CHECK(p_label(2.5) == "2.5");
    CHECK(csv_header(kP) == "time,mass,l1,l2,lp_2,lp_4,sup,moment2,entropy,entropy_abs,fisher,gradlp_2,gradlp_4");

    const Grid g = make_grid(1, 0.5, 4);
    const DiagnosticsRecord r = record(filled(g, 0.1), kP, 0.1);
    const std::string row = csv_row(r, kP);
    CHECK(row.rfind("0.1,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 12);

    std::ostringstream out;
    const std::vector<DiagnosticsRecord> rows{r, r};
    write_csv(out, rows, kP);
    CHECK(out.str() == csv_header(kP) + "\n" + row + "\n" + row + "\n");

    // Full precision round trip on the mass column.
    std::istringstream in(row);
    std::string time_field, mass_field;
    std::getline(in, time_field, ',');
    std::getline(in, mass_field, ',');
    CHECK(std::stod(mass_field) == r.mass);
}
