#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fatslit {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error classes, mapped to CLI exit codes by the harness.
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct step_rejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pairwise summation over ascending index order. Used for every quadrature
// reduction so results do not depend on evaluation order.
template <class T>
T pairwise_sum(const T* v, std::size_t n) {
    if (n == 0) return T{};
    if (n <= 8) {
        T s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Thread cap from FATSLIT_THREADS (0 or unset: hardware default, capped at 8).
inline int thread_cap() {
    static const int cap = [] {
        if (const char* env = std::getenv("FATSLIT_THREADS")) {
            int n = std::atoi(env);
            if (n > 0) return n;
        }
        unsigned hw = std::thread::hardware_concurrency();
        int n = hw == 0 ? 1 : static_cast<int>(hw);
        return n > 8 ? 8 : n;
    }();
    return cap;
}

// Deterministic parallel map: each index writes only to its own slot, so the
// result is identical to the serial loop regardless of thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    int threads = thread_cap();
    if (threads <= 1 || n < 16) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// --- Stable parametrization of the rescaled cut -----------------------------
//
// Interpolation variable tau in [-1,1], cut variable s = sin(pi tau / 2).
// The forms below avoid cancellation near the endpoints: 1 -+ s is computed
// as 2 sin^2(pi (1 -+ tau) / 4), exact to full precision for tau near +-1.

inline double s_of_tau(double tau) { return std::sin(0.5 * pi * tau); }
inline double tau_of_s(double s) { return (2.0 / pi) * std::asin(s); }
inline cplx tau_of_s(cplx s) { return (2.0 / pi) * std::asin(s); }

inline double one_minus_s(double tau) {
    double a = std::sin(0.25 * pi * (1.0 - tau));
    return 2.0 * a * a;
}
inline double one_plus_s(double tau) {
    double a = std::sin(0.25 * pi * (1.0 + tau));
    return 2.0 * a * a;
}
// ds/dtau = (pi/2) cos(pi tau/2) = pi sin(pi(1-tau)/4) sin(pi(1+tau)/4)
inline double ds_dtau(double tau) {
    return pi * std::sin(0.25 * pi * (1.0 - tau)) * std::sin(0.25 * pi * (1.0 + tau));
}
// s(tau2) - s(tau1) = 2 cos(pi(tau2+tau1)/4) sin(pi(tau2-tau1)/4), stable for
// nearby arguments.
inline double s_diff(double tau2, double tau1) {
    return 2.0 * std::cos(0.25 * pi * (tau2 + tau1)) * std::sin(0.25 * pi * (tau2 - tau1));
}

}  // namespace fatslit
