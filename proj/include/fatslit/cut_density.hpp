#pragma once

#include <nlohmann/json.hpp>

#include "fatslit/chebyshev.hpp"
#include "fatslit/quadrature.hpp"
#include "fatslit/util.hpp"

namespace fatslit {

// Canonical geometric state. The height density on the cut [p-, p+] is
//   h(p) = (p+ - p)^{beta+} (p - p-)^{beta-} q(s),
// with s the rescaled cut variable and the profile q > 0 interpolated
// barycentrically in tau, where s = sin(pi tau / 2). The sine stretch makes
// half-integer endpoint corrections of the profile analytic in tau.
class CutDensity {
  public:
    CutDensity() = default;  // empty state, h == 0

    CutDensity(double p_minus, double p_plus, double beta_minus, double beta_plus,
               BarycentricGrid grid, std::vector<double> q)
        : p_minus_(p_minus),
          p_plus_(p_plus),
          beta_minus_(beta_minus),
          beta_plus_(beta_plus),
          grid_(std::move(grid)),
          q_(std::move(q)) {
        validate();
    }

    bool empty() const { return q_.empty(); }
    double p_minus() const { return p_minus_; }
    double p_plus() const { return p_plus_; }
    double beta_minus() const { return beta_minus_; }
    double beta_plus() const { return beta_plus_; }
    double length() const { return p_plus_ - p_minus_; }
    double center() const { return 0.5 * (p_plus_ + p_minus_); }
    double scale() const { return empty() ? 1.0 : std::max(std::abs(p_minus_), std::abs(p_plus_)); }
    int node_count() const { return static_cast<int>(q_.size()); }
    const BarycentricGrid& grid() const { return grid_; }
    const std::vector<double>& q_values() const { return q_; }

    double p_of_tau(double tau) const { return center() + 0.5 * length() * s_of_tau(tau); }
    double tau_of_p(double p) const {
        double s = (2.0 * p - p_plus_ - p_minus_) / length();
        s = std::clamp(s, -1.0, 1.0);
        return tau_of_s(s);
    }
    // endpoint gaps, stable near the ends
    double gap_plus(double tau) const { return 0.5 * length() * one_minus_s(tau); }
    double gap_minus(double tau) const { return 0.5 * length() * one_plus_s(tau); }

    double profile(double tau) const { return grid_.interp(q_, tau); }
    double profile_deriv(double tau) const { return grid_.deriv(q_, tau); }

    double weight_w(double tau) const {
        return std::pow(gap_plus(tau), beta_plus_) * std::pow(gap_minus(tau), beta_minus_);
    }
    double height_tau(double tau) const { return empty() ? 0.0 : weight_w(tau) * profile(tau); }
    double height(double p) const { return empty() ? 0.0 : height_tau(tau_of_p(p)); }

    // dh/dp at tau; components (see hprime density): W' q + W q' dtau/dp
    double height_deriv_tau(double tau) const {
        if (empty()) return 0.0;
        double dp = gap_plus(tau), dm = gap_minus(tau);
        double w = std::pow(dp, beta_plus_) * std::pow(dm, beta_minus_);
        double q = profile(tau), dq = profile_deriv(tau);
        // ds/dp = 2/L, so dtau/dp = (2/L) / (ds/dtau)
        double dtau_dp = (2.0 / length()) / ds_dtau(tau);
        return w * (-beta_plus_ / dp + beta_minus_ / dm) * q + w * dq * dtau_dp;
    }

    void validate() const {
        if (empty()) return;
        if (!(p_minus_ < p_plus_)) throw invalid_input("CutDensity: need p_minus < p_plus");
        if (!(beta_minus_ > 0.0 && beta_minus_ <= 0.5) || !(beta_plus_ > 0.0 && beta_plus_ <= 0.5))
            throw invalid_input("CutDensity: endpoint exponents must lie in (0, 1/2]");
        if (static_cast<int>(q_.size()) != grid_.size())
            throw invalid_input("CutDensity: profile/node count mismatch");
        for (double v : q_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw invalid_input("CutDensity: profile values must be positive finite");
        for (double t : grid_.nodes)
            if (!(t > -1.0 && t < 1.0)) throw invalid_input("CutDensity: nodes must be interior");
    }

    bool strictly_acute() const {
        return !empty() && beta_minus_ < 0.5 && beta_plus_ < 0.5;
    }

    // --- construction helpers ---

    // Half-disk of radius R: cut [-2R, 2R], h = sqrt(4R^2 - p^2)/2.
    static CutDensity half_disk(double radius, int m) {
        if (!(radius > 0.0)) throw invalid_input("half_disk: radius must be positive");
        BarycentricGrid g = chebyshev_grid(m);
        std::vector<double> q(m, 0.5);
        return CutDensity(-2.0 * radius, 2.0 * radius, 0.5, 0.5, std::move(g), std::move(q));
    }

    // Profile given as a function of s on (-1,1).
    static CutDensity from_profile(double p_minus, double p_plus, double beta_minus,
                                   double beta_plus, int m,
                                   const std::function<double(double)>& q_of_s) {
        BarycentricGrid g = chebyshev_grid(m);
        std::vector<double> q(m);
        for (int i = 0; i < m; ++i) q[i] = q_of_s(s_of_tau(g.nodes[i]));
        return CutDensity(p_minus, p_plus, beta_minus, beta_plus, std::move(g), std::move(q));
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["p_minus"] = p_minus_;
        j["p_plus"] = p_plus_;
        j["beta_minus"] = beta_minus_;
        j["beta_plus"] = beta_plus_;
        std::vector<double> s(grid_.nodes.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = s_of_tau(grid_.nodes[i]);
        j["nodes"] = s;
        j["q"] = q_;
        return j;
    }

    static CutDensity from_json(const nlohmann::json& j) {
        std::vector<double> s = j.at("nodes").get<std::vector<double>>();
        std::vector<double> q = j.at("q").get<std::vector<double>>();
        if (s.empty()) return CutDensity();
        std::vector<double> tau(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!(s[i] > -1.0 && s[i] < 1.0))
                throw invalid_input("CutDensity json: nodes must lie in (-1,1)");
            tau[i] = tau_of_s(s[i]);
        }
        return CutDensity(j.at("p_minus").get<double>(), j.at("p_plus").get<double>(),
                          j.at("beta_minus").get<double>(), j.at("beta_plus").get<double>(),
                          barycentric_from_nodes(std::move(tau)), std::move(q));
    }

  private:
    double p_minus_ = 0.0, p_plus_ = 0.0;
    double beta_minus_ = 0.5, beta_plus_ = 0.5;
    BarycentricGrid grid_;
    std::vector<double> q_;
};

// Global quadrature for integrals of h times a function smooth in tau:
//   int h(p) f(p) dp  ~=  sum_i w[i] f(p[i]),
// built from Gauss-Jacobi in tau with exponents (2 beta+ + 1, 2 beta- + 1);
// the profile values are folded into the weights.
struct CutRule {
    std::vector<double> tau, p, w;
    int size() const { return static_cast<int>(tau.size()); }

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0, 0.0)) {
        using R = decltype(f(0.0, 0.0));
        std::vector<R> terms(tau.size());
        for (std::size_t i = 0; i < tau.size(); ++i) terms[i] = w[i] * f(p[i], tau[i]);
        return pairwise_sum(terms);
    }
};

inline CutRule make_cut_rule(const CutDensity& st, int n) {
    CutRule r;
    if (st.empty() || n < 1) return r;
    const double bp = st.beta_plus(), bm = st.beta_minus();
    const QuadRule& gj = cached_jacobi(n, 2.0 * bp + 1.0, 2.0 * bm + 1.0);
    const double half_len = 0.5 * st.length();
    const double pref = std::pow(half_len, 1.0 + bp + bm) * pi * std::pow(2.0, bp + bm);
    r.tau.resize(n);
    r.p.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double tau = gj.x[i];
        double A = std::sin(0.25 * pi * (1.0 - tau)), B = std::sin(0.25 * pi * (1.0 + tau));
        double theta = std::pow(A / (1.0 - tau), 2.0 * bp + 1.0) *
                       std::pow(B / (1.0 + tau), 2.0 * bm + 1.0);
        r.tau[i] = tau;
        r.p[i] = st.p_of_tau(tau);
        r.w[i] = pref * gj.w[i] * theta * st.profile(tau);
    }
    return r;
}

}  // namespace fatslit
