#pragma once

#include <memory>

#include "fatslit/series.hpp"
#include "fatslit/slit_map.hpp"

namespace fatslit {

struct IntegratorConfig {
    enum class Method { rk4, rk45 };
    Method method = Method::rk4;
    double dt = 1e-3;
    double tol = 1e-8;  // rk45 error target per step
    int max_steps = 200000;
    int node_count = 64;   // profile nodes M
    int truncation = 32;   // Laurent order N for Faber generators
    int quad_nodes = 128;
};

struct StepRecord {
    int flow_k;
    double dt;
    double err_est;
    bool cfl_warning;
};

struct FlowState {
    CutDensity geometry;
    std::vector<double> times;  // accumulated flow times, times[k-1] = T_k shift
    std::vector<StepRecord> step_log;

    static FlowState from_geometry(CutDensity g, int k_slots = 8) {
        FlowState fs;
        fs.geometry = std::move(g);
        fs.times.assign(k_slots, 0.0);
        return fs;
    }
    double time(int k) const {
        return k <= static_cast<int>(times.size()) ? times[k - 1] : 0.0;
    }
};

// Normal-velocity profile v_n at the cut nodes (z-plane length per unit time).
struct DeformationProfile {
    std::vector<double> values;  // at the state's tau nodes
    std::string label;
};

struct VelocityResult {
    std::vector<cplx> dz;  // dz/dT on the upper side at the state's tau nodes
    double pdot_minus = 0.0, pdot_plus = 0.0;
    std::vector<double> pv;  // transform PV values at the nodes (diagnostic)
};

namespace detail_flow {

// On-cut kinematic fields, interpolated in the stretched variable tau2
// (tau = sin(pi tau2 / 2)) on a Chebyshev grid scaled into [-c, c], c < 1.
// The scaling keeps the deepest sample at a corner gap ~2e-4, where the
// principal-value fields are still clean; beyond the grid the interpolant is
// continued as a constant, harmless because the transform densities vanish
// like gap^{2-2beta} there. Pulling the corner branch points (at tau2 = +-1)
// off the interpolation interval makes the convergence geometric.
struct CutFields {
    double clamp2 = 0.988;
    BarycentricGrid grid2;            // nodes in tau2, scaled by clamp2
    std::vector<double> tau;          // tau = s(tau2)
    std::vector<double> phi_z;        // (1/(2|z'|^2)) / (gp^{2-2b+} gm^{2-2b-})
    double e_plus = 0.0, e_minus = 0.0;  // 2-2beta

    double phi_z_at(double tau_q) const {
        double t2 = tau_of_s(std::clamp(tau_q, -1.0, 1.0));
        t2 = std::clamp(t2, -clamp2, clamp2);
        return grid2.interp(phi_z, t2);
    }
};

inline CutFields build_fields(const SlitMap& map, int n_field) {
    const CutDensity& st = map.state();
    CutFields f;
    f.grid2 = chebyshev_grid(n_field);
    for (double& t : f.grid2.nodes) t *= f.clamp2;
    f.tau.resize(n_field);
    f.phi_z.resize(n_field);
    f.e_plus = 2.0 - 2.0 * st.beta_plus();
    f.e_minus = 2.0 - 2.0 * st.beta_minus();
    for (int j = 0; j < n_field; ++j) {
        double tau = s_of_tau(f.grid2.nodes[j]);
        f.tau[j] = tau;
        double xp = map.xprime_at(tau), hp = map.hprime_at(tau);
        double zp2 = xp * xp + hp * hp;
        double gp = st.gap_plus(tau), gm = st.gap_minus(tau);
        f.phi_z[j] = 0.5 / zp2 / (std::pow(gp, f.e_plus) * std::pow(gm, f.e_minus));
    }
    return f;
}

}  // namespace detail_flow

// A flow is defined by g = v_n / |z'| on the cut. Generators produce the
// smooth factor multiplying 1/(2|z'|^2): Darcy has factor 1 (v_n = 1/(2|z'|)),
// the k-th Faber flow has factor B_k'(p), the Green-kernel deformation
// delta_a has factor 2 Im p(a) / |p - p(a)|^2.
struct FlowProfile {
    std::function<double(double)> factor;  // of tau, analytic on the cut
    std::string label;
};

inline FlowProfile darcy_profile() {
    return {[](double) { return 1.0; }, "darcy"};
}

inline FlowProfile faber_profile(const SlitMap& map, int k, int truncation) {
    if (k < 1) throw invalid_input("faber_profile: k must be >= 1");
    if (k == 1) return darcy_profile();
    auto series = map.laurent(truncation);
    auto bk = faber_polynomial(series, k);
    auto dbk = bk.deriv();
    const CutDensity* st = &map.state();
    double c = st->center(), hl = 0.5 * st->length();
    return {[dbk, c, hl](double tau) { return dbk.eval(c + hl * s_of_tau(tau)); },
            "faber-" + std::to_string(k)};
}

// v_n = -(1/2) dG^-(a, .)/dn per unit epsilon (the delta_a^- deformation)
inline FlowProfile green_kernel_profile(const SlitMap& map, cplx a) {
    cplx A = map.p_of_z(a);
    if (!(A.imag() > 0.0))
        throw invalid_input("green_kernel_profile: point must lie in the upper half plane");
    const CutDensity* st = &map.state();
    double c = st->center(), hl = 0.5 * st->length();
    return {[A, c, hl](double tau) {
                double p = c + hl * s_of_tau(tau);
                return 2.0 * A.imag() / std::norm(p - A);
            },
            "green-kernel"};
}

namespace detail_flow {

struct Rhs {
    std::vector<double> qdot;
    double pdot_minus, pdot_plus;
    double max_height_rate;
};

inline Rhs flow_rhs(const SlitMap& map, const FlowProfile& profile, int n_field,
                    PanelOptions pvopt = {}) {
    const CutDensity& st = map.state();
    const int m = st.node_count();
    CutFields fields = build_fields(map, n_field);

    CutDensityFn g_den;
    g_den.p_minus = st.p_minus();
    g_den.p_plus = st.p_plus();
    g_den.parts.push_back({fields.e_plus, fields.e_minus, [&](double tau) {
                               return profile.factor(tau) * fields.phi_z_at(tau);
                           }});

    Rhs rhs;
    rhs.pdot_plus = -endpoint_cauchy(g_den, +1, pvopt) / pi;
    rhs.pdot_minus = -endpoint_cauchy(g_den, -1, pvopt) / pi;
    const double L = st.length();
    const double ldot = rhs.pdot_plus - rhs.pdot_minus;
    const double cdot = 0.5 * (rhs.pdot_plus + rhs.pdot_minus);
    const double bsum = st.beta_plus() + st.beta_minus();

    rhs.qdot.resize(m);
    rhs.max_height_rate = 0.0;
    for (int i = 0; i < m; ++i) {
        double tau = st.grid().nodes[i];
        double pv = cauchy_pv_tau(g_den, tau, pvopt);
        double g = g_den.value(tau);
        double hp = map.hprime_at(tau), xp = map.xprime_at(tau);
        double dh_fixed_p = hp * pv / pi + xp * g;
        double pdot_i = cdot + 0.5 * ldot * s_of_tau(tau);
        double w = st.weight_w(tau);
        rhs.qdot[i] = (dh_fixed_p + hp * pdot_i) / w -
                      st.q_values()[i] * bsum * ldot / L;
        rhs.max_height_rate = std::max(rhs.max_height_rate, std::abs(dh_fixed_p));
    }
    return rhs;
}

struct PackedState {
    std::vector<double> y;  // q_0..q_{m-1}, p_minus, p_plus
};

inline PackedState pack(const CutDensity& st) {
    PackedState p;
    p.y = st.q_values();
    p.y.push_back(st.p_minus());
    p.y.push_back(st.p_plus());
    return p;
}

inline CutDensity unpack(const CutDensity& proto, const std::vector<double>& y) {
    int m = proto.node_count();
    std::vector<double> q(y.begin(), y.begin() + m);
    double pm = y[m], pp = y[m + 1];
    for (double v : q)
        if (!(v > 0.0)) throw step_rejected("flow step rejected: profile became non-positive");
    if (!(pm < pp)) throw step_rejected("flow step rejected: endpoints crossed");
    return CutDensity(pm, pp, proto.beta_minus(), proto.beta_plus(), proto.grid(), std::move(q));
}

}  // namespace detail_flow

// Generic-profile RK4 step; the profile law is re-evaluated on every stage
// state (deformation kernels depend on the evolving geometry).
inline CutDensity advance_profile(const CutDensity& st,
                                  const std::function<FlowProfile(const SlitMap&)>& gen,
                                  double dt, const IntegratorConfig& cfg,
                                  double* err_est = nullptr, bool* cfl_warning = nullptr) {
    if (st.empty()) throw invalid_input("advance_profile: cannot evolve the empty state");
    const int m = st.node_count();
    const int n_field = std::max(3 * m, 64);
    auto rhs_of = [&](const CutDensity& s) {
        SlitMap map(s, cfg.quad_nodes);
        auto r = detail_flow::flow_rhs(map, gen(map), n_field);
        std::vector<double> dy = r.qdot;
        dy.push_back(r.pdot_minus);
        dy.push_back(r.pdot_plus);
        if (cfl_warning) {
            double spacing = s.length() / (m * m);  // Chebyshev edge spacing scale
            if (r.max_height_rate * dt > spacing) *cfl_warning = true;
        }
        return dy;
    };
    auto y0 = detail_flow::pack(st).y;
    auto add = [](const std::vector<double>& a, const std::vector<double>& b, double f) {
        std::vector<double> r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + f * b[i];
        return r;
    };
    auto k1 = rhs_of(st);
    auto k2 = rhs_of(detail_flow::unpack(st, add(y0, k1, 0.5 * dt)));
    auto k3 = rhs_of(detail_flow::unpack(st, add(y0, k2, 0.5 * dt)));
    auto k4 = rhs_of(detail_flow::unpack(st, add(y0, k3, dt)));
    std::vector<double> y1(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
        y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (err_est) {
        // cheap indicator from the stage spread; a refinement study is the
        // honest error measure for RK4
        double e = 0.0;
        for (std::size_t i = 0; i < y0.size(); ++i)
            e = std::max(e, std::abs(k1[i] - k4[i]) * dt * dt);
        *err_est = e;
    }
    return detail_flow::unpack(st, y1);
}

// Embedded Cash-Karp 4(5) step; err_est receives the 4th/5th order spread.
inline CutDensity advance_profile_ck(const CutDensity& st,
                                     const std::function<FlowProfile(const SlitMap&)>& gen,
                                     double dt, const IntegratorConfig& cfg,
                                     double& err_est) {
    static const double A[6][5] = {
        {0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0},
        {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0},
        {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0},
        {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
    static const double B5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
    static const double B4[6] = {2825.0 / 27648, 0,           18575.0 / 48384,
                                 13525.0 / 55296, 277.0 / 14336, 1.0 / 4};
    const int n_field = std::max(3 * st.node_count(), 64);
    auto rhs_of = [&](const CutDensity& s) {
        SlitMap map(s, cfg.quad_nodes);
        auto r = detail_flow::flow_rhs(map, gen(map), n_field);
        std::vector<double> dy = r.qdot;
        dy.push_back(r.pdot_minus);
        dy.push_back(r.pdot_plus);
        return dy;
    };
    auto y0 = detail_flow::pack(st).y;
    std::vector<std::vector<double>> k(6);
    for (int s = 0; s < 6; ++s) {
        std::vector<double> ys = y0;
        for (int j = 0; j < s; ++j)
            for (std::size_t i = 0; i < ys.size(); ++i) ys[i] += dt * A[s][j] * k[j][i];
        k[s] = rhs_of(s == 0 ? st : detail_flow::unpack(st, ys));
    }
    std::vector<double> y5(y0.size());
    err_est = 0.0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        double d5 = 0.0, d4 = 0.0;
        for (int s = 0; s < 6; ++s) {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] = y0[i] + dt * d5;
        err_est = std::max(err_est, std::abs(dt * (d5 - d4)));
    }
    return detail_flow::unpack(st, y5);
}

// Step of the k-th hierarchy flow (k = 1: Darcy growth; k >= 2: Faber flow).
inline CutDensity advance(const CutDensity& st, int flow_k, double dt,
                          const IntegratorConfig& cfg, double* err_est = nullptr,
                          bool* cfl_warning = nullptr) {
    auto gen = [flow_k, &cfg](const SlitMap& map) {
        return flow_k == 1 ? darcy_profile() : faber_profile(map, flow_k, cfg.truncation);
    };
    if (cfg.method == IntegratorConfig::Method::rk45) {
        double err = 0.0;
        CutDensity out = advance_profile_ck(st, gen, dt, cfg, err);
        if (err_est) *err_est = err;
        if (cfl_warning) *cfl_warning = false;
        return out;
    }
    return advance_profile(st, gen, dt, cfg, err_est, cfl_warning);
}

// Single accepted step of the k-th flow; T_k advances by dt and, for k = 1,
// the higher moments are integrals of motion.
inline FlowState step_flow(const FlowState& fs, int k, double dt, const IntegratorConfig& cfg) {
    if (k < 1) throw invalid_input("step_flow: flow index must be >= 1");
    if (dt == 0.0) return fs;
    if (k == 1 && !fs.geometry.strictly_acute())
        throw invalid_input("step_flow: the T_1 growth flow requires strictly acute corners");
    FlowState out = fs;
    double err = 0.0;
    bool warn = false;
    out.geometry = advance(fs.geometry, k, dt, cfg, &err, &warn);
    if (static_cast<int>(out.times.size()) < k) out.times.resize(k, 0.0);
    out.times[k - 1] += dt;
    out.step_log.push_back({k, dt, err, warn});
    return out;
}

// Run a leg of total duration delta: fixed steps of cfg.dt (rk4) or
// error-controlled steps against cfg.tol (rk45).
inline FlowState run_flow(FlowState fs, int k, double delta, const IntegratorConfig& cfg) {
    if (delta < 0.0) throw invalid_input("run_flow: negative leg duration");
    const bool adaptive = cfg.method == IntegratorConfig::Method::rk45;
    double remaining = delta;
    double dt = std::min(cfg.dt, delta);
    int guard = 0;
    while (remaining > 1e-15 * std::max(1.0, delta)) {
        if (++guard > cfg.max_steps) throw step_rejected("run_flow: max step count exceeded");
        dt = std::min(dt, remaining);
        if (!adaptive) {
            fs = step_flow(fs, k, dt, cfg);
            remaining -= dt;
            continue;
        }
        FlowState trial = step_flow(fs, k, dt, cfg);
        double err = trial.step_log.back().err_est;
        if (err <= cfg.tol || dt <= 1e-12) {
            fs = std::move(trial);
            remaining -= dt;
            if (err > 0.0) dt *= std::clamp(0.9 * std::pow(cfg.tol / err, 0.2), 0.5, 2.0);
        } else {
            dt *= std::max(0.25, 0.9 * std::pow(cfg.tol / err, 0.25));
        }
    }
    return fs;
}

// Public velocity transform: v_n given at the state's nodes,
//   dz/dT (p + i0) = (z'/pi) [ PV int g/(p'-p) dp' + i pi g(p) ],  g = v_n/|z'|.
inline VelocityResult pg_velocity(const SlitMap& map, const DeformationProfile& prof) {
    const CutDensity& st = map.state();
    if (st.empty()) return {};
    const int m = st.node_count();
    if (static_cast<int>(prof.values.size()) != m)
        throw invalid_input("pg_velocity: profile length must match the state nodes");
    auto fields = detail_flow::build_fields(map, std::max(3 * m, 64));
    const auto& grid = st.grid();
    // g = v_n / |z'| = v_n * gp^{1-b+} gm^{1-b-} sqrt(2 phi_z)
    CutDensityFn g_den;
    g_den.p_minus = st.p_minus();
    g_den.p_plus = st.p_plus();
    double ep = 1.0 - st.beta_plus(), em = 1.0 - st.beta_minus();
    g_den.parts.push_back({ep, em, [&](double tau) {
                               double vn = grid.interp(prof.values, tau);
                               return vn * std::sqrt(2.0 * fields.phi_z_at(tau));
                           }});
    VelocityResult res;
    res.pdot_plus = -endpoint_cauchy(g_den, +1) / pi;
    res.pdot_minus = -endpoint_cauchy(g_den, -1) / pi;
    res.dz.resize(m);
    res.pv.resize(m);
    for (int i = 0; i < m; ++i) {
        double tau = grid.nodes[i];
        double pv = cauchy_pv_tau(g_den, tau);
        double g = g_den.value(tau);
        cplx zp(map.xprime_at(tau), map.hprime_at(tau));
        res.pv[i] = pv;
        res.dz[i] = zp / pi * cplx(pv, pi * g);
    }
    return res;
}

// Off-cut velocity of the map under the same profile.
inline cplx pg_velocity_offcut(const SlitMap& map, const DeformationProfile& prof, cplx p) {
    const CutDensity& st = map.state();
    if (st.empty()) return 0.0;
    auto fields = detail_flow::build_fields(map, std::max(3 * st.node_count(), 64));
    CutDensityFn g_den;
    g_den.p_minus = st.p_minus();
    g_den.p_plus = st.p_plus();
    double ep = 1.0 - st.beta_plus(), em = 1.0 - st.beta_minus();
    const auto& grid = st.grid();
    g_den.parts.push_back({ep, em, [&](double tau) {
                               double vn = grid.interp(prof.values, tau);
                               return vn * std::sqrt(2.0 * fields.phi_z_at(tau));
                           }});
    return map.deriv(p) / pi * cauchy_transform(g_den, p);
}

// v_n of the Darcy law at the state's nodes: 1/(2|z'|)
inline DeformationProfile darcy_values(const SlitMap& map) {
    const CutDensity& st = map.state();
    DeformationProfile prof;
    prof.label = "darcy";
    prof.values.resize(st.node_count());
    for (int i = 0; i < st.node_count(); ++i) {
        double tau = st.grid().nodes[i];
        prof.values[i] = 0.5 / std::sqrt(map.zprime_abs2(tau));
    }
    return prof;
}

}  // namespace fatslit
