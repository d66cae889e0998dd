#pragma once

#include <optional>

#include "fatslit/quadrature.hpp"
#include "fatslit/util.hpp"

namespace fatslit {

// One component of a cut density:
//   d(p) = (p+ - p)^{e_plus} (p - p-)^{e_minus} * phi(tau),
// phi analytic in the stretched variable tau. Densities are sums of
// components; each is integrated with endpoint rules matched to its
// exponents. Exponents may be negative (integrable, > -1).
struct CutComponent {
    double e_plus = 0.0, e_minus = 0.0;
    std::function<double(double)> phi;
};

struct CutDensityFn {
    double p_minus = 0.0, p_plus = 0.0;
    std::vector<CutComponent> parts;

    double length() const { return p_plus - p_minus; }
    double center() const { return 0.5 * (p_plus + p_minus); }
    double p_of_tau(double tau) const { return center() + 0.5 * length() * s_of_tau(tau); }

    double part_value(const CutComponent& c, double tau) const {
        double A = std::sin(0.25 * pi * (1.0 - tau)), B = std::sin(0.25 * pi * (1.0 + tau));
        double gp = length() * A * A, gm = length() * B * B;
        double v = c.phi(tau);
        if (c.e_plus != 0.0) v *= std::pow(gp, c.e_plus);
        if (c.e_minus != 0.0) v *= std::pow(gm, c.e_minus);
        return v;
    }
    double value(double tau) const {
        double v = 0.0;
        for (const auto& c : parts) v += part_value(c, tau);
        return v;
    }
};

struct PanelOptions {
    int order = 16;            // nodes per panel
    double ratio = 2.0;        // panel length <= ratio * distance to pole
    double target_half = 0.04; // half-width of the PV subtraction panel (tau)
    double min_len = 5e-14;
    bool grade_ends = false;   // geometric ladder toward both endpoints
    double end_floor = 1e-8;   // endpoint panel size when grading
    int max_panels = 2000;
};

namespace detail {

enum class PanelKind { interior, left_end, right_end, target };

struct Panel {
    double a, b;
    PanelKind kind;
};

inline double interval_point_dist(double a, double b, cplx z) {
    double dre = 0.0;
    if (z.real() < a) dre = a - z.real();
    else if (z.real() > b) dre = z.real() - b;
    return std::hypot(dre, z.imag());
}

// Build the panel partition of [-1,1] in tau.
inline std::vector<Panel> build_panels(const std::optional<cplx>& pole,
                                       const std::optional<double>& target,
                                       const PanelOptions& opt) {
    std::vector<double> edges = {-1.0, -0.5, 0.0, 0.5, 1.0};
    double ta = 0.0, tb = 0.0;
    if (target) {
        double tx = *target;
        double half = std::min(opt.target_half, 0.25 * std::min(1.0 - tx, 1.0 + tx));
        ta = tx - half;
        tb = tx + half;
        std::vector<double> kept;
        for (double e : edges)
            if (e <= ta || e >= tb) kept.push_back(e);
        kept.push_back(ta);
        kept.push_back(tb);
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        edges = std::move(kept);
    }

    std::vector<Panel> out, work;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        work.push_back({edges[i], edges[i + 1], PanelKind::interior});

    auto classify = [&](Panel& p) {
        if (target && p.a == ta && p.b == tb) p.kind = PanelKind::target;
        else if (p.a == -1.0) p.kind = PanelKind::left_end;
        else if (p.b == 1.0) p.kind = PanelKind::right_end;
        else p.kind = PanelKind::interior;
    };

    while (!work.empty()) {
        Panel p = work.back();
        work.pop_back();
        classify(p);
        double len = p.b - p.a;
        if (p.kind == PanelKind::target || len < opt.min_len ||
            static_cast<int>(out.size() + work.size()) > opt.max_panels) {
            out.push_back(p);
            continue;
        }
        bool touches_end = (p.kind == PanelKind::left_end || p.kind == PanelKind::right_end);
        bool split = false;
        if (pole) {
            double d = interval_point_dist(p.a, p.b, *pole);
            if (target) {
                // the subtraction panel owns the pole; neighbours grade to it
                d = std::max(d, 0.5 * (tb - ta));
            }
            if (len > opt.ratio * d) split = true;
        }
        if (!split && opt.grade_ends && touches_end && len > opt.end_floor) split = true;
        // keep endpoint panels representable: nodes must stay interior
        if (touches_end && len < 1e-11) split = false;
        if (split) {
            double mid = 0.5 * (p.a + p.b);
            work.push_back({p.a, mid, PanelKind::interior});
            work.push_back({mid, p.b, PanelKind::interior});
        } else {
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
    return out;
}

// tau-space integrand of one component, without the kernel:
//   d(p(tau)) * dp/dtau = (pi/2) L^{ep+em+1} sinA^{2ep+1} sinB^{2em+1} phi(tau)
inline double tau_integrand(const CutDensityFn& den, const CutComponent& c, double tau) {
    double L = den.length();
    double A = std::sin(0.25 * pi * (1.0 - tau)), B = std::sin(0.25 * pi * (1.0 + tau));
    return 0.5 * pi * std::pow(L, c.e_plus + c.e_minus + 1.0) *
           std::pow(A, 2.0 * c.e_plus + 1.0) * std::pow(B, 2.0 * c.e_minus + 1.0) * c.phi(tau);
}

// Integrate one component against a complex kernel over the panel set.
// kp/km: endpoint exponents of the kernel in p-space (for matched end rules).
template <class Kernel>
cplx integrate_component(const CutDensityFn& den, const CutComponent& c, Kernel&& kernel,
                         double kp, double km, const std::vector<Panel>& panels,
                         const PanelOptions& opt) {
    std::vector<cplx> contrib;
    contrib.reserve(panels.size());
    for (const Panel& p : panels) {
        double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
        cplx acc = 0.0;
        if (p.kind == PanelKind::right_end) {
            double a = 2.0 * (c.e_plus + kp) + 1.0;
            const QuadRule& gj = cached_jacobi(opt.order, a, 0.0);
            std::vector<cplx> t(gj.size());
            for (int i = 0; i < gj.size(); ++i) {
                double tau = mid + half * gj.x[i];
                cplx F = tau_integrand(den, c, tau) * kernel(tau);
                t[i] = gj.w[i] * F * std::pow(1.0 - tau, -a);
            }
            acc = pairwise_sum(t) * std::pow(half, a + 1.0);
        } else if (p.kind == PanelKind::left_end) {
            double b = 2.0 * (c.e_minus + km) + 1.0;
            const QuadRule& gj = cached_jacobi(opt.order, 0.0, b);
            std::vector<cplx> t(gj.size());
            for (int i = 0; i < gj.size(); ++i) {
                double tau = mid + half * gj.x[i];
                cplx F = tau_integrand(den, c, tau) * kernel(tau);
                t[i] = gj.w[i] * F * std::pow(1.0 + tau, -b);
            }
            acc = pairwise_sum(t) * std::pow(half, b + 1.0);
        } else {
            const QuadRule& gl = cached_legendre(opt.order);
            std::vector<cplx> t(gl.size());
            for (int i = 0; i < gl.size(); ++i) {
                double tau = mid + half * gl.x[i];
                t[i] = gl.w[i] * tau_integrand(den, c, tau) * kernel(tau);
            }
            acc = pairwise_sum(t) * half;
        }
        contrib.push_back(acc);
    }
    return pairwise_sum(contrib);
}

}  // namespace detail

// Reusable panel partition (pole: complex tau-plane hint to grade toward).
struct PanelScheme {
    std::vector<detail::Panel> panels;
    PanelOptions opt;
};

inline PanelScheme make_panels(PanelOptions opt = {}, std::optional<cplx> pole = std::nullopt,
                               std::optional<double> target = std::nullopt) {
    return PanelScheme{detail::build_panels(pole, target, opt), opt};
}

template <class Kernel>
cplx integrate_density(const CutDensityFn& den, Kernel&& kernel, double kp, double km,
                       const PanelScheme& scheme) {
    cplx total = 0.0;
    for (const auto& c : den.parts)
        total += detail::integrate_component(den, c, kernel, kp, km, scheme.panels, scheme.opt);
    return total;
}

// int d(p') K(tau') dp' for a kernel smooth on the open cut. kp/km declare
// the kernel's endpoint exponents; set grade_ends in opt when the kernel has
// undeclared fractional endpoint behavior.
template <class Kernel>
cplx integrate_density(const CutDensityFn& den, Kernel&& kernel, double kp = 0.0,
                       double km = 0.0, PanelOptions opt = {}) {
    return integrate_density(den, kernel, kp, km, make_panels(opt));
}

// Cauchy transform  C(zeta) = int d(p') / (p' - zeta) dp',  zeta off the cut.
// Accurate arbitrarily close to the cut (panels grade toward the pole).
inline cplx cauchy_transform(const CutDensityFn& den, cplx zeta, PanelOptions opt = {}) {
    cplx sigma = (2.0 * zeta - den.p_plus - den.p_minus) / den.length();
    cplx tau_pole = tau_of_s(sigma);
    std::optional<cplx> pole;
    if (std::abs(tau_pole.imag()) < 0.6 && std::abs(tau_pole.real()) < 1.3) pole = tau_pole;
    auto panels = detail::build_panels(pole, std::nullopt, opt);
    cplx total = 0.0;
    auto kernel = [&](double tau) { return 1.0 / (den.p_of_tau(tau) - zeta); };
    for (const auto& c : den.parts)
        total += detail::integrate_component(den, c, kernel, 0.0, 0.0, panels, opt);
    return total;
}

// Principal value  PV int d(p') / (p' - p(tau_x)) dp'  for tau_x interior.
inline double cauchy_pv_tau(const CutDensityFn& den, double tau_x, PanelOptions opt = {}) {
    if (!(tau_x > -1.0 && tau_x < 1.0))
        throw invalid_input("cauchy_pv_tau: target must be interior to the cut");
    std::optional<cplx> pole = cplx(tau_x, 0.0);
    auto panels = detail::build_panels(pole, tau_x, opt);
    const double L = den.length();

    std::vector<detail::Panel> rest;
    for (const auto& p : panels)
        if (p.kind != detail::PanelKind::target) rest.push_back(p);

    double total = 0.0;
    for (const auto& c : den.parts) {
        double dx = den.part_value(c, tau_x);
        for (const auto& p : panels) {
            if (p.kind != detail::PanelKind::target) continue;
            // subtraction on the pole panel
            const QuadRule& gl = cached_legendre(opt.order);
            double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b);
            std::vector<double> t(gl.size());
            for (int i = 0; i < gl.size(); ++i) {
                double tau = mid + half * gl.x[i];
                double pd = 0.5 * L * s_diff(tau, tau_x);
                double A = std::sin(0.25 * pi * (1.0 - tau)),
                       B = std::sin(0.25 * pi * (1.0 + tau));
                double dpdtau = 0.5 * pi * L * A * B;  // (L/2) (pi/2) cos(pi tau/2)
                t[i] = gl.w[i] * ((den.part_value(c, tau) - dx) / pd) * dpdtau;
            }
            double sub = pairwise_sum(t) * half;
            double dplus = 0.5 * L * s_diff(p.b, tau_x);   // p(b) - x > 0
            double dminus = 0.5 * L * s_diff(tau_x, p.a);  // x - p(a) > 0
            total += sub + dx * std::log(dplus / dminus);
        }
        // non-target panels: plain kernel 1/(p' - x)
        auto kernel = [&](double tau) -> cplx { return 1.0 / (0.5 * L * s_diff(tau, tau_x)); };
        total += detail::integrate_component(den, c, kernel, 0.0, 0.0, rest, opt).real();
    }
    return total;
}

// Boundary value from the +i0 / -i0 side: PV +- i pi d(x).
inline cplx cauchy_boundary(const CutDensityFn& den, double tau_x, int side,
                            PanelOptions opt = {}) {
    double pv = cauchy_pv_tau(den, tau_x, opt);
    double d = den.value(tau_x);
    return cplx(pv, side >= 0 ? pi * d : -pi * d);
}

// int d(p') / (p' - p_end) dp' with the pole at an endpoint; requires the
// density to vanish there fast enough (e_end > 0 after the shift).
inline double endpoint_cauchy(const CutDensityFn& den, int which_end, PanelOptions opt = {}) {
    CutDensityFn shifted = den;
    double sign = 1.0;
    for (auto& c : shifted.parts) {
        if (which_end > 0) {
            if (c.e_plus <= 0.0)
                throw invalid_input("endpoint_cauchy: density does not vanish at p_plus");
            c.e_plus -= 1.0;
        } else {
            if (c.e_minus <= 0.0)
                throw invalid_input("endpoint_cauchy: density does not vanish at p_minus");
            c.e_minus -= 1.0;
        }
    }
    if (which_end > 0) sign = -1.0;  // 1/(p' - p+) = -1/(p+ - p')
    auto one = [](double) -> cplx { return 1.0; };
    return sign * integrate_density(shifted, one, 0.0, 0.0, opt).real();
}

}  // namespace fatslit
