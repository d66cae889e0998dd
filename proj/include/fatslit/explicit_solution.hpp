#pragma once

#include "fatslit/cut_density.hpp"
#include "fatslit/util.hpp"

namespace fatslit {
namespace self_similar {

// Self-similar growing state with degenerate base x- = x+ = 0:
//   p(z,T) = (z^2 + 2T^2)/sqrt(z^2 + T^2),
//   z(p,T) = 2^{-1/2} (p^2-4T^2)^{1/4} (p + (p^2-4T^2)^{1/2})^{1/2},
// boundary |z^2 + T^2| = T^2, cut [-2T, 2T], corner exponents 1/4.

// (p^2-4T^2)^{1/2}, branch ~ p at infinity, cut [-2T,2T]; valid Im p >= 0.
inline cplx sqrt_D_upper(double T, cplx p) {
    return std::sqrt(p - 2.0 * T) * std::sqrt(p + 2.0 * T);
}

inline cplx map_z(double T, cplx p) {
    if (T <= 0.0) throw invalid_input("self_similar: T must be positive");
    if (p.imag() < 0.0) return std::conj(map_z(T, std::conj(p)));
    if (p.imag() == 0.0 && std::abs(p.real()) < 2.0 * T) {
        // boundary value from above: z = sqrt(T rho) e^{i(pi/4 + theta/2)}
        double rho = std::sqrt(4.0 * T * T - p.real() * p.real());
        double theta = std::atan2(rho, p.real());
        return std::sqrt(T * rho) * std::polar(1.0, 0.25 * pi + 0.5 * theta);
    }
    if (p.imag() == 0.0 && std::abs(p.real()) == 2.0 * T)
        throw invalid_input("self_similar: map rejected at cut endpoints");
    cplx rt = sqrt_D_upper(T, p);
    return std::sqrt(0.5) * std::sqrt(rt) * std::sqrt(p + rt);
}

// dz/dp = (1 + T^2/z^2)^{3/2}; 1 + T^2/z^2 avoids the negative real axis on
// the exterior of the boundary curve, so the principal branch is analytic.
inline cplx dz_dp(double T, cplx p) {
    cplx z = map_z(T, p);
    return std::pow(1.0 + T * T / (z * z), 1.5);
}

// dz/dT at fixed p: -2T z (p + 2 D^{1/2}) / (D (p + D^{1/2})), D = p^2-4T^2.
inline cplx dz_dT(double T, cplx p) {
    if (p.imag() < 0.0) return std::conj(dz_dT(T, std::conj(p)));
    cplx rt, z = map_z(T, p);
    if (p.imag() == 0.0 && std::abs(p.real()) < 2.0 * T) {
        double rho = std::sqrt(4.0 * T * T - p.real() * p.real());
        rt = cplx(0.0, rho);
    } else {
        rt = sqrt_D_upper(T, p);
    }
    cplx D = p * p - 4.0 * T * T;
    return -2.0 * T * z * (p + 2.0 * rt) / (D * (p + rt));
}

inline cplx map_p(double T, cplx z) {
    // sqrt(z^2+T^2) = z sqrt(1+T^2/z^2), principal inner root: branch cut on
    // the segment [-iT, iT], which lies inside the symmetric domain.
    cplx w = z * std::sqrt(1.0 + T * T / (z * z));
    return (z * z + 2.0 * T * T) / w;
}

// polar boundary curve R(theta) = T sqrt(-2 cos 2 theta), pi/4 <= theta <= 3pi/4
inline double radius(double T, double theta) {
    double c = -2.0 * std::cos(2.0 * theta);
    if (c < 0.0) throw invalid_input("self_similar: theta outside [pi/4, 3pi/4]");
    return T * std::sqrt(c);
}

inline double height(double T, double p_on_cut) {
    double rho = std::sqrt(std::max(0.0, 4.0 * T * T - p_on_cut * p_on_cut));
    double theta = std::atan2(rho, p_on_cut);
    return std::sqrt(T * rho) * std::sin(0.25 * pi + 0.5 * theta);
}

// Sampled cut density: h(p) = (2T-p)^{1/4}(p+2T)^{1/4} sqrt(T) cos(pi tau/4).
inline CutDensity density(double T, int m) {
    if (T <= 0.0) throw invalid_input("self_similar: T must be positive");
    BarycentricGrid g = chebyshev_grid(m);
    std::vector<double> q(m);
    for (int i = 0; i < m; ++i) q[i] = std::sqrt(T) * std::cos(0.25 * pi * g.nodes[i]);
    return CutDensity(-2.0 * T, 2.0 * T, 0.25, 0.25, std::move(g), std::move(q));
}

}  // namespace self_similar
}  // namespace fatslit
