#pragma once

#include "fatslit/util.hpp"

namespace fatslit {

// z(p) = p + sum_{k=1..N} c_k p^{-k}, real coefficients, hydrodynamic
// normalization (leading term exactly p, no constant). c_1 = -u.
struct TruncatedLaurent {
    int order = 0;           // N
    std::vector<double> c;   // c[k-1] = c_k

    TruncatedLaurent() = default;
    TruncatedLaurent(int n, std::vector<double> coeffs) : order(n), c(std::move(coeffs)) {
        if (order < 1) throw invalid_input("TruncatedLaurent: order must be >= 1");
        if (static_cast<int>(c.size()) != order)
            throw invalid_input("TruncatedLaurent: coefficient count mismatch");
        for (double v : c)
            if (!std::isfinite(v)) throw invalid_input("TruncatedLaurent: non-finite coefficient");
    }

    double capacity() const { return -c[0]; }

    cplx eval(cplx p) const {
        cplx inv = 1.0 / p, acc = 0.0;
        for (int k = order - 1; k >= 0; --k) acc = (acc + c[k]) * inv;
        return p + acc;
    }
    cplx deriv(cplx p) const {
        cplx inv = 1.0 / p, acc = 0.0;
        for (int k = order - 1; k >= 0; --k) acc = (acc - (k + 1) * c[k]) * inv;
        return 1.0 + acc * inv;
    }
};

// Monic real polynomial B_k(p), coefficients highest degree first.
struct FaberPolynomial {
    int degree = 0;
    std::vector<double> coeff;

    cplx eval(cplx p) const {
        cplx acc = 0.0;
        for (double a : coeff) acc = acc * p + a;
        return acc;
    }
    double eval(double p) const {
        double acc = 0.0;
        for (double a : coeff) acc = acc * p + a;
        return acc;
    }
    FaberPolynomial deriv() const {
        FaberPolynomial d;
        d.degree = degree > 0 ? degree - 1 : 0;
        if (degree == 0) {
            d.coeff = {0.0};
            return d;
        }
        d.coeff.resize(degree);
        for (int i = 0; i < degree; ++i) d.coeff[i] = coeff[i] * (degree - i);
        // non-monic in general; callers treat it as a plain polynomial
        return d;
    }
};

// Dense two-sided truncated series: coefficients of p^hi .. p^lo.
struct TwoSidedSeries {
    int hi = 0, lo = 0;
    std::vector<double> c;  // c[i] = coefficient of p^(hi - i)

    double coeff(int power) const {
        if (power > hi || power < lo) return 0.0;
        return c[hi - power];
    }
    void set(int power, double v) { c[hi - power] = v; }

    static TwoSidedSeries zero(int hi, int lo) {
        TwoSidedSeries s;
        s.hi = hi;
        s.lo = lo;
        s.c.assign(hi - lo + 1, 0.0);
        return s;
    }
};

inline TwoSidedSeries series_multiply(const TwoSidedSeries& a, const TwoSidedSeries& b, int lo_cut) {
    TwoSidedSeries r = TwoSidedSeries::zero(a.hi + b.hi, lo_cut);
    for (int i = 0; i < static_cast<int>(a.c.size()); ++i) {
        if (a.c[i] == 0.0) continue;
        int pa = a.hi - i;
        for (int j = 0; j < static_cast<int>(b.c.size()); ++j) {
            int pw = pa + b.hi - j;
            if (pw < lo_cut) break;
            r.c[r.hi - pw] += a.c[i] * b.c[j];
        }
    }
    return r;
}

// Two-sided series for z^k(p), exact from p^k down to p^{-order}.
// With the map known to order N, coefficients of p^{-j} are reliable for
// j <= N - k + 1; deeper requests are rejected rather than silently padded.
inline TwoSidedSeries series_power(const TruncatedLaurent& map, int k, int order) {
    if (k < 1) throw invalid_input("series_power: k must be >= 1");
    if (order > map.order - k + 1)
        throw invalid_input("series_power: requested order exceeds reliable range N - k + 1");
    int lo_cut = -std::max(order, 0);
    // intermediate products keep k extra low-order terms: each remaining
    // factor carries a p^{+1} term that can raise them back into the window
    int lo_work = lo_cut - k;
    TwoSidedSeries z = TwoSidedSeries::zero(1, std::min(-map.order, lo_work));
    z.set(1, 1.0);
    for (int j = 1; j <= map.order && -j >= z.lo; ++j) z.set(-j, map.c[j - 1]);
    TwoSidedSeries acc = z;
    for (int i = 1; i < k; ++i) acc = series_multiply(acc, z, lo_work);
    // trim to requested window
    TwoSidedSeries out = TwoSidedSeries::zero(k, lo_cut);
    for (int pw = out.hi; pw >= out.lo; --pw) out.set(pw, acc.coeff(pw));
    return out;
}

// B_k(p) = polynomial part of z^k(p); monic of degree k.
inline FaberPolynomial faber_polynomial(const TruncatedLaurent& map, int k) {
    if (k < 1 || k > map.order)
        throw invalid_input("faber_polynomial: k out of range [1, N]");
    TwoSidedSeries zk = series_power(map, k, 0);
    FaberPolynomial b;
    b.degree = k;
    b.coeff.resize(k + 1);
    for (int pw = k; pw >= 0; --pw) b.coeff[k - pw] = zk.coeff(pw);
    return b;
}

// One-sided series p(z) = z + sum u_k z^{-k}; reuses TruncatedLaurent layout
// (coefficients u_k in .c).
namespace detail {

// reciprocal of P(z) = z + sum u_k z^{-k} as a series z^{-1} + ... down to z^{lo}
inline TwoSidedSeries series_reciprocal_of_map(const std::vector<double>& u, int lo) {
    // P = z (1 + w), w = sum u_k z^{-k-1};  1/P = z^{-1} sum_j (-w)^j
    int depth = -lo + 2;
    TwoSidedSeries w = TwoSidedSeries::zero(0, lo);
    for (int k = 1; k <= static_cast<int>(u.size()); ++k)
        if (-k - 1 >= w.lo) w.set(-k - 1, u[k - 1]);
    TwoSidedSeries geom = TwoSidedSeries::zero(0, lo);
    geom.set(0, 1.0);
    TwoSidedSeries wp = w;
    int sign = -1;
    for (int j = 1; j <= depth / 2 + 1; ++j) {
        for (int i = 0; i < static_cast<int>(wp.c.size()); ++i)
            geom.c[geom.hi - (wp.hi - i)] += sign * wp.c[i];
        wp = series_multiply(wp, w, lo);
        sign = -sign;
        bool allzero = true;
        for (double v : wp.c)
            if (v != 0.0) {
                allzero = false;
                break;
            }
        if (allzero) break;
    }
    // shift by z^{-1}
    TwoSidedSeries r = TwoSidedSeries::zero(-1, lo - 1);
    for (int pw = geom.hi; pw >= geom.lo; --pw) r.set(pw - 1, geom.coeff(pw));
    return r;
}

}  // namespace detail

// Series reversion: p(z) = z + sum_{k<=order} u_k z^{-k} with z(p(z)) = z.
// Fixed-point iteration on the coefficients; each pass settles one more
// order, stops early when the round-trip residual is below 1e-13.
inline TruncatedLaurent invert_map(const TruncatedLaurent& map, int order) {
    if (order < 1 || order > map.order)
        throw invalid_input("invert_map: order out of range [1, N]");
    std::vector<double> u(order, 0.0);
    const int lo = -order;
    for (int pass = 0; pass < order + 2; ++pass) {
        // residual series: z(p(z)) - z = sum_k c_k p(z)^{-k}  (+ u-part)
        TwoSidedSeries pinv = detail::series_reciprocal_of_map(u, lo - 1);
        TwoSidedSeries acc = TwoSidedSeries::zero(0, lo);  // sum c_k p^{-k}
        TwoSidedSeries pik = pinv;
        for (int k = 1; k <= map.order; ++k) {
            if (k > 1) pik = series_multiply(pik, pinv, lo - 1);
            if (pik.hi < lo) break;
            double ck = map.c[k - 1];
            if (ck != 0.0) {
                for (int pw = std::min(acc.hi, pik.hi); pw >= lo; --pw)
                    acc.c[acc.hi - pw] += ck * pik.coeff(pw);
            }
        }
        double delta = 0.0;
        for (int k = 1; k <= order; ++k) {
            double target = -acc.coeff(-k);
            delta = std::max(delta, std::abs(u[k - 1] - target));
            u[k - 1] = target;
        }
        if (delta < 1e-13) break;
    }
    return TruncatedLaurent(order, std::move(u));
}

// Coefficients of z(p(z)) - z in powers of z^{-1}; diagnostic for reversion.
inline double roundtrip_residual(const TruncatedLaurent& map, const TruncatedLaurent& inverse) {
    int order = inverse.order;
    int lo = -order;
    TwoSidedSeries pinv = detail::series_reciprocal_of_map(inverse.c, lo - 1);
    TwoSidedSeries acc = TwoSidedSeries::zero(0, lo);
    TwoSidedSeries pik = pinv;
    for (int k = 1; k <= map.order; ++k) {
        if (k > 1) pik = series_multiply(pik, pinv, lo - 1);
        if (pik.hi < lo) break;
        double ck = map.c[k - 1];
        if (ck != 0.0)
            for (int pw = std::min(acc.hi, pik.hi); pw >= lo; --pw)
                acc.c[acc.hi - pw] += ck * pik.coeff(pw);
    }
    double res = 0.0;
    for (int k = 1; k <= order; ++k) res = std::max(res, std::abs(inverse.c[k - 1] + acc.coeff(-k)));
    return res;
}

}  // namespace fatslit
