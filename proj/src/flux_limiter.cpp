#include "fld/flux_limiter.hpp"

#include "fld/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fld {

void Params::validate() const {
    if (!(chi >= 0.0) || !std::isfinite(chi)) {
        throw Error(ErrorKind::ValidationError, fmt::format("chi must be >= 0 (got {})", chi));
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw Error(ErrorKind::ValidationError, fmt::format("eps must be >= 0 (got {})", eps));
    }
}

double euclidean_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> face_flux(double rho_face, std::span<const double> grad, const Params& params) {
    const double coef = limiter(rho_face, euclidean_norm(grad), params.chi) + params.eps;
    std::vector<double> out(grad.begin(), grad.end());
    for (double& x : out) x *= coef;
    return out;
}

std::vector<double> clamped_operator(std::span<const double> v, double c) {
    // Same convention as the density limiter with rho = 1, chi = c.
    const double coef = limiter(1.0, euclidean_norm(v), c);
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) x *= coef;
    return out;
}

std::vector<double> unclamped_operator(std::span<const double> v, double c) {
    const double n = euclidean_norm(v);
    std::vector<double> out(v.size(), 0.0);
    if (n == 0.0) return out;
    const double coef = 1.0 - c / n;
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = coef * v[k];
    return out;
}

namespace {

double pairing(const std::vector<double>& fw, const std::vector<double>& fz, std::span<const double> w,
               std::span<const double> z) {
    if (w.size() != z.size()) throw Error(ErrorKind::InvalidArgument, "gap: vectors differ in length");
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += (fw[k] - fz[k]) * (w[k] - z[k]);
    return s;
}

}  // namespace

double monotone_gap(std::span<const double> w, std::span<const double> z, double c) {
    return pairing(clamped_operator(w, c), clamped_operator(z, c), w, z);
}

double unclamped_gap(std::span<const double> w, std::span<const double> z, double c) {
    return pairing(unclamped_operator(w, c), unclamped_operator(z, c), w, z);
}

double flux_deviation(double rho, std::span<const double> grad, double chi) {
    // |limiter * grad - grad| = (1 - limiter) |grad|; 1 - limiter is taken in
    // its complementary form chi * rho / |grad| to avoid cancellation.
    const double g = euclidean_norm(grad);
    if (limiter(rho, g, chi) == 0.0) return g;
    return (chi * rho / g) * g;
}

}  // namespace fld
