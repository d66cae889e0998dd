#pragma once

#include "fatslit/util.hpp"

namespace fatslit {

// Barycentric Lagrange interpolation on a fixed node set in (-1,1).
// Nodes ascending; weights scaled to unit max magnitude.
struct BarycentricGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }

    double interp(const std::vector<double>& f, double t) const {
        const int m = size();
        double num = 0.0, den = 0.0;
        for (int i = 0; i < m; ++i) {
            double d = t - nodes[i];
            if (std::abs(d) < 1e-14 * (1.0 + std::abs(t))) return f[i];
            double c = weights[i] / d;
            num += c * f[i];
            den += c;
        }
        return num / den;
    }

    // Derivative of the interpolant. At a node, uses the differentiation
    // matrix row; elsewhere the rational-derivative form.
    double deriv(const std::vector<double>& f, double t) const {
        const int m = size();
        for (int i = 0; i < m; ++i) {
            if (std::abs(t - nodes[i]) < 1e-13 * (1.0 + std::abs(t)))
                return deriv_at_node(f, i);
        }
        double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
        for (int i = 0; i < m; ++i) {
            double d = t - nodes[i];
            double c = weights[i] / d;
            num += c * f[i];
            den += c;
            double c2 = c / d;
            dnum += c2 * f[i];
            dden += c2;
        }
        double p = num / den;
        return (-dnum + p * dden) / den;
    }

    double deriv_at_node(const std::vector<double>& f, int i) const {
        const int m = size();
        double s = 0.0, dii = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            double dij = weights[j] / (weights[i] * (nodes[i] - nodes[j]));
            s += dij * f[j];
            dii -= dij;
        }
        return s + dii * f[i];
    }
};

// Chebyshev points of the first kind (all interior), ascending.
inline BarycentricGrid chebyshev_grid(int m) {
    if (m < 1) throw invalid_input("chebyshev_grid: need at least one node");
    BarycentricGrid g;
    g.nodes.resize(m);
    g.weights.resize(m);
    for (int i = 0; i < m; ++i) {
        double theta = pi * (2.0 * (m - 1 - i) + 1.0) / (2.0 * m);
        g.nodes[i] = std::cos(theta);
        g.weights[i] = ((m - 1 - i) % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
    }
    return g;
}

// Weights for an arbitrary node set, O(m^2), rescaled to avoid overflow.
inline BarycentricGrid barycentric_from_nodes(std::vector<double> nodes) {
    const int m = static_cast<int>(nodes.size());
    if (m < 1) throw invalid_input("barycentric_from_nodes: empty node set");
    BarycentricGrid g;
    g.nodes = std::move(nodes);
    std::vector<double> logs(m);
    std::vector<int> signs(m);
    for (int i = 0; i < m; ++i) {
        double logw = 0.0;
        int sign = 1;
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            double d = g.nodes[i] - g.nodes[j];
            if (d == 0.0) throw invalid_input("barycentric_from_nodes: repeated node");
            logw -= std::log(std::abs(d));
            if (d < 0) sign = -sign;
        }
        logs[i] = logw;
        signs[i] = sign;
    }
    double lmax = *std::max_element(logs.begin(), logs.end());
    g.weights.resize(m);
    for (int i = 0; i < m; ++i) g.weights[i] = signs[i] * std::exp(logs[i] - lmax);
    return g;
}

}  // namespace fatslit
