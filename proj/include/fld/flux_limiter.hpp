#pragma once

#include <span>
#include <vector>

namespace fld {

/// Physical constants of the flux-limited equation and its viscous version.
/// chi = 0 switches the limiter off (coefficient 1 wherever the gradient is
/// nonzero), which turns the scheme into the plain heat equation.
struct Params {
    double chi = 1.0;
    double eps = 0.0;

    void validate() const;
};

/// Positive-part coefficient (1 - chi*rho/|grad|)_+, with 0 at grad = 0.
inline double limiter(double rho, double grad_norm, double chi) {
    if (grad_norm <= chi * rho) return 0.0;
    return 1.0 - chi * rho / grad_norm;
}

/// Face flux (limiter + eps) * grad. `rho_face` is the mean of the two
/// neighbouring cells; the limiter sees the full gradient norm.
std::vector<double> face_flux(double rho_face, std::span<const double> grad, const Params& params);

/// F(v) = (1 - c/|v|)_+ v, with F(0) = 0.
std::vector<double> clamped_operator(std::span<const double> v, double c);

/// (1 - c/|v|) v without the positive part; F(0) = 0.
std::vector<double> unclamped_operator(std::span<const double> v, double c);

/// [F(w) - F(z)] . (w - z) for the clamped operator. Nonnegative.
double monotone_gap(std::span<const double> w, std::span<const double> z, double c);

/// Same pairing for the operator without the positive part; may be negative.
double unclamped_gap(std::span<const double> w, std::span<const double> z, double c);

/// |limiter * grad - grad|, bounded by chi * rho.
double flux_deviation(double rho, std::span<const double> grad, double chi);

double euclidean_norm(std::span<const double> v);

}  // namespace fld
