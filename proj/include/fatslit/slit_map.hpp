#pragma once

#include "fatslit/cauchy.hpp"
#include "fatslit/cut_density.hpp"
#include "fatslit/series.hpp"

namespace fatslit {

struct BoundarySample {
    double p, x, h;
};

struct BoundaryCurve {
    std::vector<BoundarySample> samples;  // p descending: traversal x+ -> x-
    double x_minus = 0.0, x_plus = 0.0;
};

// Map evaluation bound to one CutDensity:
//   z(p) = p + (1/pi) int h(p') dp' / (p' - p),
// exact Cauchy representation, valid on and off the cut. Far from the cut the
// global Gauss-Jacobi rule is used; near and on the cut, graded panels.
class SlitMap {
  public:
    explicit SlitMap(CutDensity st, int n_quad = 128)
        : state_(std::move(st)), n_quad_(n_quad) {
        if (!state_.empty()) {
            rule_ = make_cut_rule(state_, n_quad_);
            h_den_.p_minus = state_.p_minus();
            h_den_.p_plus = state_.p_plus();
            h_den_.parts.push_back({state_.beta_plus(), state_.beta_minus(),
                                    [this](double tau) { return state_.profile(tau); }});
            hp_den_.p_minus = state_.p_minus();
            hp_den_.p_plus = state_.p_plus();
            const double bp = state_.beta_plus(), bm = state_.beta_minus();
            hp_den_.parts.push_back(
                {bp - 1.0, bm, [this, bp](double tau) { return -bp * state_.profile(tau); }});
            hp_den_.parts.push_back(
                {bp, bm - 1.0, [this, bm](double tau) { return bm * state_.profile(tau); }});
            hp_den_.parts.push_back({bp - 0.5, bm - 0.5, [this](double tau) {
                                         return (2.0 / pi) * state_.profile_deriv(tau);
                                     }});
        }
    }

    SlitMap(const SlitMap&) = delete;
    SlitMap& operator=(const SlitMap&) = delete;

    const CutDensity& state() const { return state_; }
    int quad_size() const { return n_quad_; }
    const CutRule& rule() const { return rule_; }
    const CutDensityFn& h_density() const { return h_den_; }
    const CutDensityFn& hprime_density() const { return hp_den_; }

    bool on_segment_axis(cplx p) const {
        return p.imag() == 0.0 && p.real() > state_.p_minus() && p.real() < state_.p_plus();
    }

    // distance from p to the cut segment
    double cut_distance(cplx p) const {
        double x = std::clamp(p.real(), state_.p_minus(), state_.p_plus());
        return std::hypot(p.real() - x, p.imag());
    }

    cplx eval(cplx p) const {
        if (state_.empty()) return p;
        if (p == cplx(state_.p_minus(), 0.0) || p == cplx(state_.p_plus(), 0.0))
            throw invalid_input("eval_map: evaluation at a cut endpoint is rejected");
        if (on_segment_axis(p))
            return z_cut(state_.tau_of_p(p.real()), +1);  // boundary value from above
        if (cut_distance(p) > 0.35 * state_.length()) {
            cplx c = rule_.integrate([&](double pp, double) { return 1.0 / (pp - p); });
            return p + c / pi;
        }
        return p + cauchy_transform(h_den_, p) / pi;
    }

    cplx deriv(cplx p) const {
        if (state_.empty()) return 1.0;
        if (cut_distance(p) > 0.35 * state_.length()) {
            cplx c = rule_.integrate([&](double pp, double) {
                cplx d = pp - p;
                return 1.0 / (d * d);
            });
            return 1.0 + c / pi;
        }
        // z' = 1 + (1/pi) int h'/(p'-p): integration by parts, h(p±)=0
        return 1.0 + cauchy_transform(hp_den_, p) / pi;
    }

    // --- values on the cut (upper side: z = x + i h) ---

    double h_at(double tau) const { return state_.height_tau(tau); }
    double hprime_at(double tau) const { return state_.height_deriv_tau(tau); }

    double x_at(double tau) const {
        if (state_.empty()) throw invalid_input("x_at: empty state has no cut");
        {
            std::lock_guard<std::mutex> lock(memo_mutex_);
            auto it = x_memo_.find(tau);
            if (it != x_memo_.end()) return it->second;
        }
        double v = state_.p_of_tau(tau) + cauchy_pv_tau(h_den_, tau) / pi;
        std::lock_guard<std::mutex> lock(memo_mutex_);
        x_memo_.emplace(tau, v);
        return v;
    }
    double xprime_at(double tau) const {
        {
            std::lock_guard<std::mutex> lock(memo_mutex_);
            auto it = xp_memo_.find(tau);
            if (it != xp_memo_.end()) return it->second;
        }
        double v = 1.0 + cauchy_pv_tau(hp_den_, tau) / pi;
        std::lock_guard<std::mutex> lock(memo_mutex_);
        xp_memo_.emplace(tau, v);
        return v;
    }

    cplx z_cut(double tau, int side = +1) const {
        return cplx(x_at(tau), (side >= 0 ? 1.0 : -1.0) * h_at(tau));
    }
    cplx zprime_cut(double tau, int side = +1) const {
        return cplx(xprime_at(tau), (side >= 0 ? 1.0 : -1.0) * hprime_at(tau));
    }
    double zprime_abs2(double tau) const {
        double xp = xprime_at(tau), hp = hprime_at(tau);
        return xp * xp + hp * hp;
    }

    // corner images x(p±)
    double x_end(int which) const {
        if (state_.empty()) throw invalid_input("x_end: empty state");
        double pe = which > 0 ? state_.p_plus() : state_.p_minus();
        return pe + endpoint_cauchy(h_den_, which) / pi;
    }

    BoundaryCurve boundary(int n) const {
        BoundaryCurve bc;
        if (state_.empty()) return bc;
        bc.x_plus = x_end(+1);
        bc.x_minus = x_end(-1);
        bc.samples.reserve(n + 2);
        bc.samples.push_back({state_.p_plus(), bc.x_plus, 0.0});
        for (int i = 0; i < n; ++i) {
            double tau = std::cos(pi * (2.0 * i + 1.0) / (2.0 * n));  // descending
            bc.samples.push_back({state_.p_of_tau(tau), x_at(tau), h_at(tau)});
        }
        bc.samples.push_back({state_.p_minus(), bc.x_minus, 0.0});
        return bc;
    }

    // Laurent view: u = mu_0/pi, c_k = -mu_{k-1}/pi with mu_m = int h p^m dp.
    TruncatedLaurent laurent(int order) const {
        if (order < 1) throw invalid_input("laurent: order must be >= 1");
        std::vector<double> c(order, 0.0);
        if (!state_.empty()) {
            for (int k = 1; k <= order; ++k) {
                double mu = rule_.integrate(
                    [&](double p, double) { return std::pow(p, k - 1); });
                c[k - 1] = -mu / pi;
            }
        }
        return TruncatedLaurent(order, std::move(c));
    }

    double capacity() const {
        if (state_.empty()) return 0.0;
        return rule_.integrate([](double, double) { return 1.0; }) / pi;
    }

    // Forward map p(z) by damped Newton on eval(); seeded by the reverted
    // series far out, by z itself otherwise.
    cplx p_of_z(cplx z, double tol = 1e-12, int max_iter = 50) const {
        if (state_.empty()) return z;
        const double sc = state_.scale();
        cplx p = z;
        if (std::abs(z) > 3.0 * sc) {
            ensure_series();
            p = z;
            cplx inv = 1.0 / z, acc = 0.0;
            const auto& u = inv_series_->c;
            for (int k = static_cast<int>(u.size()) - 1; k >= 0; --k)
                acc = (acc + u[k]) * inv;
            p = z + acc;
        } else if (std::abs(p.imag()) < 0.05 * sc && p.real() > state_.p_minus() - 0.5 * sc &&
                   p.real() < state_.p_plus() + 0.5 * sc) {
            // near the cut: start slightly above to stay in the upper half plane
            p += cplx(0.0, 0.2 * sc);
        }
        double best = 1e300;
        for (int it = 0; it < max_iter; ++it) {
            cplx r = eval(p) - z;
            double rn = std::abs(r);
            if (rn < tol * std::max(1.0, std::abs(z))) return p;
            cplx dz = deriv(p);
            cplx step = r / dz;
            // damped update, keep iterate off the cut
            double lam = 1.0;
            for (int half = 0; half < 12; ++half) {
                cplx cand = p - lam * step;
                if (z.imag() > 0.0 && cand.imag() <= 0.0 &&
                    cand.real() > state_.p_minus() && cand.real() < state_.p_plus()) {
                    lam *= 0.5;
                    continue;
                }
                double cn = std::abs(eval(cand) - z);
                if (cn < rn || lam < 1e-3) {
                    p = cand;
                    break;
                }
                lam *= 0.5;
            }
            best = std::min(best, rn);
        }
        throw quadrature_error("p_of_z: Newton did not converge, residual " +
                               std::to_string(best));
    }

    const TruncatedLaurent& series(int order = 16) const {
        ensure_series(order);
        return *series_;
    }

  private:
    void ensure_series(int order = 16) const {
        if (!series_) {
            series_.emplace(laurent(order));
            inv_series_.emplace(invert_map(*series_, order));
        }
    }

    CutDensity state_;
    int n_quad_;
    CutRule rule_;
    CutDensityFn h_den_, hp_den_;
    mutable std::optional<TruncatedLaurent> series_;
    mutable std::optional<TruncatedLaurent> inv_series_;
    mutable std::mutex memo_mutex_;
    mutable std::map<double, double> x_memo_, xp_memo_;
};

}  // namespace fatslit
