#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <tuple>

#include "fatslit/util.hpp"

namespace fatslit {

// Nodes ascending in [-1,1] with positive weights.
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
    int size() const { return static_cast<int>(x.size()); }
};

// Gauss-Jacobi rule for weight (1-x)^alpha (1+x)^beta, alpha,beta > -1.
// Golub-Welsch on the symmetric tridiagonal Jacobi matrix.
inline QuadRule gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw invalid_input("gauss_jacobi: n must be >= 1");
    if (alpha <= -1.0 || beta <= -1.0)
        throw invalid_input("gauss_jacobi: exponents must exceed -1");
    const double ab = alpha + beta;
    // total weight mu0 = 2^(a+b+1) B(a+1, b+1)
    const double mu0 = std::pow(2.0, ab + 1.0) *
                       std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                                std::lgamma(ab + 2.0));

    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
    diag(0) = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double t = 2.0 * k + ab;
        diag(k) = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double b2;
        if (k == 1) {
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                 ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            double t = 2.0 * k + ab;
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                 (t * t * (t + 1.0) * (t - 1.0));
        }
        sub(k - 1) = std::sqrt(b2);
    }

    QuadRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    if (n == 1) {
        rule.x[0] = diag(0);
        rule.w[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw quadrature_error("gauss_jacobi: tridiagonal eigensolve failed");
    for (int i = 0; i < n; ++i) {
        rule.x[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        rule.w[i] = mu0 * v0 * v0;
    }
    return rule;
}

inline QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Process-wide cache; rules are immutable once built.
inline const QuadRule& cached_jacobi(int n, double alpha, double beta) {
    static std::map<std::tuple<int, double, double>, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_tuple(n, alpha, beta);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(n, alpha, beta)).first;
    return it->second;
}

inline const QuadRule& cached_legendre(int n) { return cached_jacobi(n, 0.0, 0.0); }

// Symmetric 7-point degree-5 rule on a triangle, barycentric coordinates.
struct TrianglePoint {
    double l1, l2, l3, w;
};
inline const std::array<TrianglePoint, 7>& triangle_rule7() {
    static const std::array<TrianglePoint, 7> pts = [] {
        const double a = 0.059715871789770, b = 0.470142064105115;
        const double c = 0.797426985353087, d = 0.101286507323456;
        const double wa = 0.132394152788506, wb = 0.125939180544827;
        std::array<TrianglePoint, 7> p{};
        p[0] = {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225};
        p[1] = {a, b, b, wa};
        p[2] = {b, a, b, wa};
        p[3] = {b, b, a, wa};
        p[4] = {c, d, d, wb};
        p[5] = {d, c, d, wb};
        p[6] = {d, d, c, wb};
        return p;
    }();
    return pts;
}

}  // namespace fatslit
