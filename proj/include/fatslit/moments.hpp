#pragma once

#include "fatslit/slit_map.hpp"

namespace fatslit {

struct MomentSet {
    int K = 0;
    std::vector<double> T, V;
    double u = 0.0;
};

namespace detail_mom {

// grade toward both endpoints: the on-cut kernels x(tau), z'(tau) carry
// fractional corner corrections that no fixed rule matches; order 24 keeps
// the per-panel error from those corrections below 1e-12
inline PanelOptions contour_options() {
    PanelOptions opt;
    opt.order = 24;
    opt.grade_ends = true;
    opt.end_floor = 1e-10;
    return opt;
}

}  // namespace detail_mom

inline bool degenerate_base(const SlitMap& map) {
    if (map.state().empty()) return false;
    return std::abs(map.x_end(+1) - map.x_end(-1)) < 1e-7 * map.state().scale();
}

// Harmonic moments by the contour representation
//   T_k = (2/(pi k)) Im int_gamma y z^{-k} dz,
// integrated by parts (h vanishes at the endpoints):
//   T_1 = (2/pi) int h'(p) arg z(p+i0) dp,
//   T_k = (2/(pi k (1-k))) Im int h'(p) z(p+i0)^{1-k} dp,  k >= 2.
inline std::vector<double> harmonic_moments(const SlitMap& map, int K) {
    if (K < 1) throw invalid_input("harmonic_moments: K must be >= 1");
    std::vector<double> T(K, 0.0);
    if (map.state().empty()) return T;
    const bool degen = degenerate_base(map);
    if (!degen) {
        double xm = map.x_end(-1), xp = map.x_end(+1);
        if (!(xm < 0.0 && xp > 0.0))
            throw invalid_input("harmonic_moments: the origin must lie inside the base");
    } else if (K > 1) {
        throw invalid_input(
            "harmonic_moments: higher moments are ill-defined for a degenerate base");
    }
    auto scheme = make_panels(detail_mom::contour_options());
    const auto& den = map.hprime_density();
    for (int k = 1; k <= K; ++k) {
        if (k == 1) {
            auto kern = [&](double tau) -> cplx {
                return std::arg(cplx(map.x_at(tau), map.h_at(tau)));
            };
            T[0] = (2.0 / pi) * integrate_density(den, kern, 0.0, 0.0, scheme).real();
        } else {
            auto kern = [&](double tau) -> cplx {
                cplx z(map.x_at(tau), map.h_at(tau));
                return std::pow(z, 1 - k);
            };
            cplx I = integrate_density(den, kern, 0.0, 0.0, scheme);
            T[k - 1] = 2.0 / (pi * k * (1.0 - k)) * I.imag();
        }
    }
    return T;
}

// Interior moments V_k = (2/pi) Im int_B z^k d2z, reduced by Stokes:
//   int_B z^k d2z = (1/2i) [ int_base x^{k+1} dx + int_gamma z^k conj(z) dz ]
inline std::vector<double> interior_moments(const SlitMap& map, int K) {
    if (K < 1) throw invalid_input("interior_moments: K must be >= 1");
    std::vector<double> V(K, 0.0);
    if (map.state().empty()) return V;
    const double xm = map.x_end(-1), xp = map.x_end(+1);
    auto scheme = make_panels(detail_mom::contour_options());
    const auto& hden = map.h_density();
    for (int k = 1; k <= K; ++k) {
        double i_base = (std::pow(xp, k + 2) - std::pow(xm, k + 2)) / (k + 2);
        // I_gamma = -int_{p-}^{p+} z^k conj(z) z' dp ; the kernel carries the
        // z' ~ gap^{beta-1} endpoint singularity, declared so the end panels
        // use matched Jacobi rules
        CutDensityFn unit{hden.p_minus, hden.p_plus, {{0.0, 0.0, [](double) { return 1.0; }}}};
        auto kern = [&](double tau) -> cplx {
            cplx z(map.x_at(tau), map.h_at(tau));
            cplx zp(map.xprime_at(tau), map.hprime_at(tau));
            return std::pow(z, k) * std::conj(z) * zp;
        };
        cplx i_gamma = -integrate_density(unit, kern, map.state().beta_plus() - 1.0,
                                          map.state().beta_minus() - 1.0, scheme);
        V[k - 1] = -(i_base + i_gamma.real()) / pi;
    }
    return V;
}

inline MomentSet moment_set(const SlitMap& map, int K) {
    MomentSet m;
    m.K = K;
    m.T = harmonic_moments(map, K);
    m.V = interior_moments(map, K);
    m.u = map.capacity();
    if (!map.state().empty()) {
        if (!(m.T[0] > 0.0)) throw quadrature_error("moment_set: T_1 must be positive");
        if (!(m.u > 0.0)) throw quadrature_error("moment_set: capacity must be positive");
    }
    return m;
}

// --- generating function of the moments (Cauchy integral over d(B u Bbar)) ---

enum class Side { inside, outside };

// point-in-polygon test against the symmetric domain boundary
inline bool inside_symmetric_domain(const SlitMap& map, cplx z, int n_poly = 256) {
    if (map.state().empty()) return false;
    auto bc = map.boundary(n_poly);
    std::vector<cplx> poly;
    poly.reserve(2 * bc.samples.size());
    for (auto it = bc.samples.rbegin(); it != bc.samples.rend(); ++it)
        poly.push_back(cplx(it->x, -it->h));  // lower boundary, x- -> x+
    for (const auto& s : bc.samples) poly.push_back(cplx(s.x, s.h));  // upper, x+ -> x-
    bool in = false;
    std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        bool cross = ((poly[i].imag() > z.imag()) != (poly[j].imag() > z.imag())) &&
                     (z.real() < (poly[j].real() - poly[i].real()) *
                                         (z.imag() - poly[i].imag()) /
                                         (poly[j].imag() - poly[i].imag()) +
                                     poly[i].real());
        if (cross) in = !in;
    }
    return in;
}

// M(z) = (1/pi i) oint |y'| dz'/(z' - z); inside D it generates k T_k z^{k-1},
// outside it generates V_k z^{-k-1}. tau_hint: nearest cut parameter when z is
// close to the boundary (used to grade panels toward the near-singularity).
inline cplx moment_generating_raw(const SlitMap& map, cplx z,
                                  std::optional<double> tau_hint = std::nullopt) {
    if (map.state().empty()) return 0.0;
    std::optional<cplx> pole;
    if (tau_hint) {
        double t0 = *tau_hint;
        cplx zb(map.x_at(t0), map.h_at(t0));
        cplx zp(map.xprime_at(t0), map.hprime_at(t0));
        double dp_dtau = 0.5 * map.state().length() * ds_dtau(t0);
        double dtau = std::abs(z - zb) / std::max(1e-30, std::abs(zp) * dp_dtau);
        pole = cplx(t0, std::max(dtau, 1e-9));
    }
    PanelOptions opt = detail_mom::contour_options();
    auto scheme = make_panels(opt, pole);
    const auto& hden = map.h_density();
    auto kern = [&](double tau) -> cplx {
        cplx zu(map.x_at(tau), map.h_at(tau));
        cplx zpu(map.xprime_at(tau), map.hprime_at(tau));
        cplx zl = std::conj(zu), zpl = std::conj(zpu);
        // orientation: upper side runs p+ -> p-, lower side p- -> p+
        return zpl / (zl - z) - zpu / (zu - z);
    };
    cplx I = integrate_density(hden, kern, map.state().beta_plus() - 1.0,
                               map.state().beta_minus() - 1.0, scheme);
    return I / cplx(0.0, pi);
}

inline cplx moment_generating(const SlitMap& map, cplx z, Side side) {
    if (map.state().empty()) return 0.0;
    bool in = inside_symmetric_domain(map, z);
    if (side == Side::inside && !in)
        throw invalid_input("moment_generating: z is not strictly inside the domain");
    if (side == Side::outside && in)
        throw invalid_input("moment_generating: z is not strictly outside the domain");
    return moment_generating_raw(map, z);
}

// --- Omega(z) = int_0^z M_+ dz + int_z^infty M_- dz -------------------------
// Inside path: straight segment from 0 to the boundary point z(p0) (valid for
// the star-shaped test geometries). Outside path: vertical ray to i*infinity.
inline cplx omega(const SlitMap& map, double tau0, int path_nodes = 24) {
    if (map.state().empty()) return 0.0;
    if (!(tau0 > -1.0 && tau0 < 1.0))
        throw invalid_input("omega: boundary parameter must be interior to the cut");
    cplx z0(map.x_at(tau0), map.h_at(tau0));

    const QuadRule& gl = cached_legendre(path_nodes);
    // graded composite along [0,1]: panels refine toward the boundary end
    std::vector<double> edges = {0.0, 0.5, 0.75, 0.9, 0.97, 0.995, 1.0};
    cplx inside_part = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double a = edges[e], b = edges[e + 1];
        cplx acc = 0.0;
        for (int i = 0; i < gl.size(); ++i) {
            double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            cplx zt = t * z0;
            acc += gl.w[i] * moment_generating_raw(map, zt, tau0);
        }
        inside_part += acc * 0.5 * (b - a) * z0;
    }

    // outside: z = z0 + i t, t = A s/(1-s)
    const double A = 2.0 * map.state().scale();
    std::vector<double> oedges = {0.0, 0.02, 0.08, 0.25, 0.6, 1.0};
    cplx outside_part = 0.0;
    for (std::size_t e = 0; e + 1 < oedges.size(); ++e) {
        double a = oedges[e], b = oedges[e + 1];
        cplx acc = 0.0;
        for (int i = 0; i < gl.size(); ++i) {
            double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            if (s >= 1.0) continue;
            double t = A * s / (1.0 - s);
            double jac = A / ((1.0 - s) * (1.0 - s));
            cplx zt = z0 + cplx(0.0, t);
            acc += gl.w[i] * moment_generating_raw(map, zt, tau0) * jac;
        }
        outside_part += acc * 0.5 * (b - a) * cplx(0.0, 1.0);
    }
    return inside_part + outside_part;
}

}  // namespace fatslit
