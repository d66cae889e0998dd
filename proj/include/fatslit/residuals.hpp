#pragma once

#include "fatslit/explicit_solution.hpp"
#include "fatslit/flow.hpp"
#include "fatslit/moments.hpp"

namespace fatslit {

namespace detail_res {

// Interior probe nodes for on-cut residuals. The product z_p z_T grows like
// gap^{-3/2} toward the corners, amplifying both roundoff and state error;
// probes stay inside |tau| <= 0.98 so the tolerances remain meaningful.
inline std::vector<double> cut_probes(int n = 33, double clamp = 0.98) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = clamp * std::cos(pi * (2.0 * i + 1.0) / (2.0 * n));
    return t;
}

}  // namespace detail_res

// sup over interior probe nodes of |Im[ dz/dp(p-i0) dz/dT(p+i0) ] - 1/2| with
// dz/dT from the velocity transform of the (optionally rescaled) Darcy
// profile. With scale = 1 this checks internal consistency of the two
// derivative routes; scaling the profile shifts the product proportionally.
inline double string_residual(const SlitMap& map, double profile_scale = 1.0) {
    const CutDensity& st = map.state();
    if (st.empty()) throw invalid_input("string_residual: empty state");
    auto fields = detail_flow::build_fields(map, std::max(3 * st.node_count(), 64));
    CutDensityFn g_den;
    g_den.p_minus = st.p_minus();
    g_den.p_plus = st.p_plus();
    g_den.parts.push_back({fields.e_plus, fields.e_minus, [&](double tau) {
                               return profile_scale * fields.phi_z_at(tau);
                           }});
    double worst = 0.0;
    for (double tau : detail_res::cut_probes()) {
        double pv = cauchy_pv_tau(g_den, tau);
        double g = g_den.value(tau);
        cplx zp(map.xprime_at(tau), map.hprime_at(tau));
        cplx dzdT = zp / pi * cplx(pv, pi * g);
        double lhs = (std::conj(zp) * dzdT).imag();
        worst = std::max(worst, std::abs(lhs - 0.5));
    }
    return worst;
}

// Same relation with both derivatives taken from the closed-form self-similar
// solution; measures the truth of the evolution equation itself.
inline double string_residual_explicit(double T, int n_probe = 33) {
    double worst = 0.0;
    for (double tau : detail_res::cut_probes(n_probe)) {
        double p = 2.0 * T * s_of_tau(tau);
        cplx dzdp = self_similar::dz_dp(T, cplx(p, 0.0));  // upper side
        cplx dzdT = self_similar::dz_dT(T, cplx(p, 0.0));
        double lhs = (std::conj(dzdp) * dzdT).imag();
        worst = std::max(worst, std::abs(lhs - 0.5));
    }
    return worst;
}

// Numerically evolved state against the closed-form time derivative at the
// same T: deviations reflect the accumulated state error.
inline double string_residual_vs_explicit(const SlitMap& map, double T) {
    double worst = 0.0;
    for (double tau : detail_res::cut_probes()) {
        double p = map.state().p_of_tau(tau);
        cplx dzdp_lower = std::conj(map.zprime_cut(tau, +1));
        cplx dzdT = self_similar::dz_dT(T, cplx(p, 0.0));
        double lhs = (dzdp_lower * dzdT).imag();
        worst = std::max(worst, std::abs(lhs - 0.5));
    }
    return worst;
}

namespace detail_res {

inline std::vector<cplx> probe_points(const CutDensity& st, int n = 16) {
    std::vector<cplx> pts(n);
    double R = 3.0 * std::max(std::abs(st.p_plus()), std::abs(st.p_minus()));
    for (int i = 0; i < n; ++i) pts[i] = std::polar(R, pi * (i + 0.5) / n);
    return pts;
}

struct FlowPair {
    CutDensity plus, minus;
};

inline FlowPair flow_pair(const CutDensity& st, int k, double fd, const IntegratorConfig& cfg) {
    return {advance(st, k, fd, cfg), advance(st, k, -fd, cfg)};
}

}  // namespace detail_res

// Lax equation residual: sup over probe points of
//   | dz/dT_k - (dB_k/dp dz/dT_1 - dB_k/dT_1 dz/dp) |.
inline double lax_residual(const CutDensity& st, int k, double fd_step,
                           const IntegratorConfig& cfg) {
    if (k < 1) throw invalid_input("lax_residual: k must be >= 1");
    auto probes = detail_res::probe_points(st);
    auto fk = detail_res::flow_pair(st, k, fd_step, cfg);
    auto f1 = detail_res::flow_pair(st, 1, fd_step, cfg);
    SlitMap map0(st, cfg.quad_nodes);
    SlitMap map_kp(fk.plus, cfg.quad_nodes), map_km(fk.minus, cfg.quad_nodes);
    SlitMap map_1p(f1.plus, cfg.quad_nodes), map_1m(f1.minus, cfg.quad_nodes);

    auto series0 = map0.laurent(cfg.truncation);
    auto bk = faber_polynomial(series0, k);
    auto dbk_dp = bk.deriv();
    auto bk_1p = faber_polynomial(map_1p.laurent(cfg.truncation), k);
    auto bk_1m = faber_polynomial(map_1m.laurent(cfg.truncation), k);

    double worst = 0.0;
    for (cplx p : probes) {
        cplx dz_dTk = (map_kp.eval(p) - map_km.eval(p)) / (2.0 * fd_step);
        cplx dz_dT1 = (map_1p.eval(p) - map_1m.eval(p)) / (2.0 * fd_step);
        cplx dBk_dT1 = (bk_1p.eval(p) - bk_1m.eval(p)) / (2.0 * fd_step);
        cplx bracket = dbk_dp.eval(p) * dz_dT1 - dBk_dT1 * map0.deriv(p);
        worst = std::max(worst, std::abs(dz_dTk - bracket));
    }
    return worst;
}

// Zakharov-Shabat residual: sup over probes of
//   | dB_j/dT_k - dB_k/dT_j + {B_j, B_k} |.
inline double zakharov_shabat_residual(const CutDensity& st, int j, int k, double fd_step,
                                       const IntegratorConfig& cfg) {
    if (j < 1 || k < 1) throw invalid_input("zakharov_shabat_residual: indices must be >= 1");
    if (j == k) return 0.0;  // antisymmetric by construction
    auto probes = detail_res::probe_points(st);
    SlitMap map0(st, cfg.quad_nodes);
    auto series0 = map0.laurent(cfg.truncation);
    auto bj = faber_polynomial(series0, j), bk = faber_polynomial(series0, k);
    auto dbj = bj.deriv(), dbk = bk.deriv();

    auto faber_of = [&](const CutDensity& s, int kk) {
        SlitMap m(s, cfg.quad_nodes);
        return faber_polynomial(m.laurent(cfg.truncation), kk);
    };
    auto fj = detail_res::flow_pair(st, j, fd_step, cfg);
    auto fk = detail_res::flow_pair(st, k, fd_step, cfg);
    auto f1 = detail_res::flow_pair(st, 1, fd_step, cfg);
    auto bj_kp = faber_of(fk.plus, j), bj_km = faber_of(fk.minus, j);
    auto bk_jp = faber_of(fj.plus, k), bk_jm = faber_of(fj.minus, k);
    auto bj_1p = faber_of(f1.plus, j), bj_1m = faber_of(f1.minus, j);
    auto bk_1p = faber_of(f1.plus, k), bk_1m = faber_of(f1.minus, k);

    double worst = 0.0;
    for (cplx p : probes) {
        cplx dBj_dTk = (bj_kp.eval(p) - bj_km.eval(p)) / (2.0 * fd_step);
        cplx dBk_dTj = (bk_jp.eval(p) - bk_jm.eval(p)) / (2.0 * fd_step);
        cplx dBj_dT1 = (bj_1p.eval(p) - bj_1m.eval(p)) / (2.0 * fd_step);
        cplx dBk_dT1 = (bk_1p.eval(p) - bk_1m.eval(p)) / (2.0 * fd_step);
        cplx bracket = dbj.eval(p) * dBk_dT1 - dBj_dT1 * dbk.eval(p);
        worst = std::max(worst, std::abs(dBj_dTk - dBk_dTj + bracket));
    }
    return worst;
}

// Special case dB_k(p(z))/dT_1 = dp(z)/dT_k at fixed z.
inline double kp4_residual(const CutDensity& st, int k, double fd_step,
                           const IntegratorConfig& cfg) {
    auto probes = detail_res::probe_points(st, 8);
    auto fk = detail_res::flow_pair(st, k, fd_step, cfg);
    auto f1 = detail_res::flow_pair(st, 1, fd_step, cfg);
    SlitMap map_kp(fk.plus, cfg.quad_nodes), map_km(fk.minus, cfg.quad_nodes);
    SlitMap map_1p(f1.plus, cfg.quad_nodes), map_1m(f1.minus, cfg.quad_nodes);
    auto bk_1p = faber_polynomial(map_1p.laurent(cfg.truncation), k);
    auto bk_1m = faber_polynomial(map_1m.laurent(cfg.truncation), k);
    double worst = 0.0;
    for (cplx z : probes) {
        // probes are in the p plane scale; reuse them as z-plane points
        cplx lhs = (bk_1p.eval(map_1p.p_of_z(z)) - bk_1m.eval(map_1m.p_of_z(z))) /
                   (2.0 * fd_step);
        cplx rhs = (map_kp.p_of_z(z) - map_km.p_of_z(z)) / (2.0 * fd_step);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

}  // namespace fatslit
