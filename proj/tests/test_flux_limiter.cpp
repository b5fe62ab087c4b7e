#include <doctest.h>

#include "fld/flux_limiter.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace fld;

TEST_CASE("limiter values") {
    CHECK(limiter(1.0, 2.0, 1.0) == 0.5);
    CHECK(limiter(1.0, 0.5, 1.0) == 0.0);
    CHECK(limiter(2.0, 0.0, 1.0) == 0.0);
    CHECK(limiter(0.0, 3.0, 5.0) == 1.0);
    CHECK(limiter(0.0, 0.0, 5.0) == 0.0);
}

TEST_CASE("limiter range, degenerate kill and Lipschitz bound (property)") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 100000; ++k) {
        const double rho = u(rng), g = u(rng), chi = 0.01 + u(rng);
        const double a = limiter(rho, g, chi);
        CHECK_UNARY(a >= 0.0);
        CHECK_UNARY(a <= 1.0);
        if (rho > 0.0) CHECK_UNARY(a < 1.0);
        if (g <= chi * rho) CHECK_UNARY(a == 0.0);

        const double rho2 = u(rng);
        if (g > 0.0) {
            const double diff = std::abs(a - limiter(rho2, g, chi));
            CHECK_UNARY(diff <= chi * std::abs(rho - rho2) / g * (1.0 + 1e-12) + 1e-15);
        }
    }
}

TEST_CASE("face_flux examples") {
    {
        const std::vector<double> grad{3.0, 4.0};
        const auto f = face_flux(2.0, grad, Params{1.0, 0.0});
        CHECK(f[0] == doctest::Approx(1.8));
        CHECK(f[1] == doctest::Approx(2.4));
    }
    {
        const std::vector<double> grad{0.0, 0.0};
        for (double rho : {0.0, 1.0, 7.0}) {
            const auto f = face_flux(rho, grad, Params{1.0, 0.3});
            CHECK(f[0] == 0.0);
            CHECK(f[1] == 0.0);
        }
    }
    {
        const std::vector<double> grad{0.5};
        const auto f = face_flux(1.0, grad, Params{1.0, 0.25});
        CHECK(f[0] == doctest::Approx(0.125));
    }
}

TEST_CASE("monotone_gap examples") {
    const std::vector<double> ones{1.0, 1.0};
    CHECK(monotone_gap(ones, ones, 1.0) == 0.0);

    const std::vector<double> w{2.0, 0.0}, z{0.5, 0.0};
    CHECK(monotone_gap(w, z, 1.0) == doctest::Approx(1.5));

    const std::vector<double> zero{0.0, 0.0};
    CHECK(monotone_gap(zero, zero, 1.0) == 0.0);
    CHECK(monotone_gap(w, zero, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("unclamped operator loses monotonicity") {
    // Along one ray (1 - c/|v|) v = v - c, which is still monotone:
    // F(0.5) = -0.5, F(0.25) = -0.75, gap = 0.25 * 0.25.
    const std::vector<double> w{0.5, 0.0}, z{0.25, 0.0};
    CHECK(unclamped_gap(w, z, 1.0) == doctest::Approx(0.0625));
    // Opposite directions inside |v| < c: F(w) = (-0.5, 0), F(z) = (0.5, 0).
    const std::vector<double> zneg{-0.5, 0.0};
    CHECK(unclamped_gap(w, zneg, 1.0) == doctest::Approx(-1.0));
    CHECK(monotone_gap(w, zneg, 1.0) == 0.0);
}

TEST_CASE("monotone_gap is nonnegative on random pairs (property)") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int d : {1, 2, 3}) {
        for (double c : {0.1, 1.0, 10.0}) {
            double min_gap = 1.0;
            std::vector<double> w(d), z(d);
            for (int s = 0; s < 100000; ++s) {
                for (auto& x : w) x = u(rng);
                for (auto& x : z) x = u(rng);
                min_gap = std::min(min_gap, monotone_gap(w, z, c));
                const double self = monotone_gap(w, w, c);
                CHECK_UNARY(self == 0.0);
            }
            CHECK(min_gap >= -1e-12);
        }
    }
}

TEST_CASE("flux deviation bound") {
    const std::vector<double> active{3.0, 4.0};  // |g| = 5 > chi * rho = 2
    CHECK(flux_deviation(2.0, active, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<double> clamped{0.3, 0.4};  // |g| = 0.5 <= 2
    CHECK(flux_deviation(2.0, clamped, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(flux_deviation(0.0, active, 1.0) == 0.0);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 100000; ++k) {
        const double rho = std::abs(u(rng)), chi = std::abs(u(rng));
        const std::vector<double> g{u(rng), u(rng)};
        CHECK_UNARY(flux_deviation(rho, g, chi) <= chi * rho * (1.0 + 4e-16) + 1e-15);
    }
}

TEST_CASE("Params validation") {
    CHECK_NOTHROW(Params{0.0, 0.0}.validate());
    CHECK_THROWS(Params{-1.0, 0.0}.validate());
    CHECK_THROWS(Params{1.0, -0.1}.validate());
}
