#include <catch2/catch_amalgamated.hpp>

#include "fatslit/explicit_solution.hpp"
#include "fatslit/moments.hpp"
#include "fatslit/shapes.hpp"

using namespace fatslit;

namespace {

// Radial boundary distance R_B(theta) for star-shaped (about 0) states:
// solve arg z_cut(tau) = theta by bisection.
double boundary_radius(const SlitMap& map, double theta) {
    auto ang = [&](double tau) { return std::arg(cplx(map.x_at(tau), map.h_at(tau))); };
    double lo = -1.0 + 1e-13, hi = 1.0 - 1e-13;
    // arg decreases from ~pi at tau=-1 to ~0 at tau=+1
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ang(mid) > theta) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15) break;
    }
    double tau = 0.5 * (lo + hi);
    return std::abs(cplx(map.x_at(tau), map.h_at(tau)));
}

// Independent oracle: 2D moment integrals reduced to the theta integral with
// the radial part done in closed form.
double oracle_T(const SlitMap& map, int k, int n_theta = 200) {
    const auto& gl = cached_legendre(24);
    std::vector<double> edges;
    for (int i = 0; i <= n_theta; ++i) edges.push_back(pi * i / n_theta);
    double total = 0.0;
    for (int e = 0; e < n_theta; ++e) {
        double a = edges[e], b = edges[e + 1], acc = 0.0;
        for (int i = 0; i < gl.size(); ++i) {
            double th = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            double R = boundary_radius(map, th);
            if (k == 1) acc += gl.w[i] * std::sin(th) * R;
            else acc += gl.w[i] * std::sin(k * th) * std::pow(R, 2 - k);
        }
        total += acc * 0.5 * (b - a);
    }
    if (k == 1) return (2.0 / pi) * total;
    return -(2.0 / (pi * k * (k - 2))) * total;
}

double oracle_V(const SlitMap& map, int k, int n_theta = 200) {
    const auto& gl = cached_legendre(24);
    double total = 0.0;
    for (int e = 0; e < n_theta; ++e) {
        double a = pi * e / n_theta, b = pi * (e + 1) / n_theta, acc = 0.0;
        for (int i = 0; i < gl.size(); ++i) {
            double th = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            double R = boundary_radius(map, th);
            acc += gl.w[i] * std::sin(k * th) * std::pow(R, k + 2);
        }
        total += acc * 0.5 * (b - a);
    }
    return 2.0 / (pi * (k + 2)) * total;
}

}  // namespace

TEST_CASE("half-disk harmonic moments match the closed form") {
    SlitMap map(CutDensity::half_disk(1.0, 48), 128);
    auto T = harmonic_moments(map, 5);
    CHECK(T[0] == Catch::Approx(4.0 / pi).margin(1e-10));
    CHECK(T[1] == Catch::Approx(0.0).margin(1e-10));
    CHECK(T[2] == Catch::Approx(-4.0 / (9.0 * pi)).margin(1e-10));
    CHECK(T[3] == Catch::Approx(0.0).margin(1e-10));
    CHECK(T[4] == Catch::Approx(-4.0 / (75.0 * pi)).margin(1e-10));
    // radius 2: T_1 = 8/pi
    SlitMap map2(CutDensity::half_disk(2.0, 48), 128);
    CHECK(harmonic_moments(map2, 1)[0] == Catch::Approx(8.0 / pi).margin(1e-9));
}

TEST_CASE("empty state moments vanish") {
    SlitMap map(CutDensity{});
    for (double t : harmonic_moments(map, 4)) CHECK(t == 0.0);
    for (double v : interior_moments(map, 4)) CHECK(v == 0.0);
}

TEST_CASE("half-disk interior moments") {
    SlitMap map(CutDensity::half_disk(1.0, 48), 128);
    auto V = interior_moments(map, 3);
    CHECK(V[0] == Catch::Approx(4.0 / (3.0 * pi)).margin(1e-10));
    CHECK(V[1] == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("generic state agrees with the 2D quadrature oracle") {
    SlitMap map(shapes::mild_blob(48), 128);
    auto T = harmonic_moments(map, 5);
    auto V = interior_moments(map, 3);
    CHECK(T[0] == Catch::Approx(oracle_T(map, 1)).margin(1e-6));
    for (int k : {3, 4, 5}) {
        CAPTURE(k);
        CHECK(T[k - 1] == Catch::Approx(oracle_T(map, k)).margin(1e-6));
    }
    for (int k : {1, 2, 3}) {
        CAPTURE(k);
        CHECK(V[k - 1] == Catch::Approx(oracle_V(map, k)).margin(1e-6));
    }
    // positivity
    CHECK(T[0] > 0.0);
    CHECK(map.capacity() > 0.0);
}

TEST_CASE("degenerate base: T1 defined, higher moments rejected") {
    SlitMap map(self_similar::density(0.5, 48), 128);
    CHECK(degenerate_base(map));
    double T1 = harmonic_moments(map, 1)[0];
    CHECK(T1 == Catch::Approx(0.5).margin(1e-8));  // T identified with T_1
    CHECK_THROWS_AS(harmonic_moments(map, 2), invalid_input);
}

TEST_CASE("moment generating function: half-disk closed form") {
    SlitMap map(CutDensity::half_disk(1.0, 48), 128);
    auto closed = [](cplx z) {
        return (1.0 / pi) * (2.0 + (z * z - 1.0) / z * std::log((1.0 - z) / (1.0 + z)));
    };
    cplx m = moment_generating(map, cplx(0.5, 0.0), Side::inside);
    CHECK(m.real() == Catch::Approx(1.16116).margin(1e-5));
    CHECK(m.real() == Catch::Approx(closed(cplx(0.5, 0.0)).real()).margin(1e-6));
    CHECK(std::abs(m.imag()) < 1e-8);
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.6, 0.1), cplx(0.0, 0.85), cplx(-0.2, -0.4)}) {
        CAPTURE(z.real(), z.imag());
        CHECK(std::abs(moment_generating(map, z, Side::inside) - closed(z)) < 1e-6);
    }
    // side checks
    CHECK_THROWS_AS(moment_generating(map, cplx(3.0, 0.5), Side::inside), invalid_input);
    CHECK_THROWS_AS(moment_generating(map, cplx(0.1, 0.1), Side::outside), invalid_input);
    // empty state
    SlitMap none(CutDensity{});
    CHECK(moment_generating(none, cplx(0.3, 0.1), Side::inside) == cplx(0.0));
}

TEST_CASE("generating function expansions reproduce the moments") {
    SlitMap map(shapes::mild_blob(48), 128);
    auto T = harmonic_moments(map, 4);
    auto V = interior_moments(map, 3);
    // fit M_+ near 0 on a small circle: coefficient of z^{k-1} is k T_k
    const int n = 64;
    const double r = 0.12;
    std::vector<cplx> vals(n);
    for (int j = 0; j < n; ++j)
        vals[j] = moment_generating_raw(map, std::polar(r, 2.0 * pi * j / n));
    for (int k = 1; k <= 4; ++k) {
        cplx ck = 0.0;
        for (int j = 0; j < n; ++j)
            ck += vals[j] * std::polar(1.0, -2.0 * pi * j * (k - 1) / n);
        ck /= n * std::pow(r, k - 1);
        CAPTURE(k);
        CHECK(ck.real() == Catch::Approx(k * T[k - 1]).margin(1e-8));
        CHECK(std::abs(ck.imag()) < 1e-8);
    }
    // M_- at 10i: leading term V_1 / z^2
    cplx mm = moment_generating(map, cplx(0.0, 10.0), Side::outside);
    cplx lead = V[0] / (cplx(0.0, 10.0) * cplx(0.0, 10.0)) +
                V[1] / std::pow(cplx(0.0, 10.0), 3) + V[2] / std::pow(cplx(0.0, 10.0), 4);
    CHECK(std::abs(mm - lead) < 1e-5);
}

TEST_CASE("Orlov-Shulman boundary value M -> 2h") {
    SlitMap map(shapes::mild_blob(48), 128);
    double tau0 = 0.2;
    cplx zb(map.x_at(tau0), map.h_at(tau0));
    cplx zp(map.xprime_at(tau0), map.hprime_at(tau0));
    cplx n_hat = cplx(0, 1) * zp / std::abs(zp);  // outward normal of D, upper side
    double h = map.h_at(tau0);
    // M_+(inside) - M_-(outside) -> 2 h, linear extrapolation in distance
    auto gap = [&](double d) {
        cplx m_in = moment_generating_raw(map, zb - d * n_hat, tau0);
        cplx m_out = moment_generating_raw(map, zb + d * n_hat, tau0);
        return (m_in - m_out).real();
    };
    double g1 = gap(2e-3), g2 = gap(1e-3);
    double extrap = 2.0 * g2 - g1;
    CHECK(extrap == Catch::Approx(2.0 * h).epsilon(2e-5));
}

TEST_CASE("omega: imaginary part is h^2 and real differences are areas") {
    SlitMap map(CutDensity::half_disk(1.0, 40), 96);
    cplx om_top = omega(map, 0.0);
    CHECK(om_top.imag() == Catch::Approx(1.0).margin(2e-6));  // h(0)^2 = 1

    double tau1 = 0.35, tau2 = -0.4;
    cplx o1 = omega(map, tau1), o2 = omega(map, tau2);
    CHECK(o1.imag() == Catch::Approx(std::pow(map.h_at(tau1), 2)).margin(2e-6));

    // partial areas by trapezoid on a dense boundary polyline
    auto bc = map.boundary(4000);
    auto area_up_to = [&](double x_stop) {
        double a = 0.0;
        // samples run from x_plus down to x_minus; accumulate from the left
        for (std::size_t i = bc.samples.size() - 1; i > 0; --i) {
            const auto& s1 = bc.samples[i];      // smaller x
            const auto& s0 = bc.samples[i - 1];  // larger x
            if (s0.x <= x_stop) {
                a += 0.5 * (s1.h + s0.h) * (s0.x - s1.x);
            } else if (s1.x < x_stop) {
                double f = (x_stop - s1.x) / (s0.x - s1.x);
                double hm = s1.h + f * (s0.h - s1.h);
                a += 0.5 * (s1.h + hm) * (x_stop - s1.x);
            }
        }
        return a;
    };
    double x1 = map.x_at(tau1), x2 = map.x_at(tau2);
    double lhs = o1.real() - o2.real();
    double rhs = 2.0 * (area_up_to(x1) - area_up_to(x2));
    CHECK(lhs == Catch::Approx(rhs).margin(5e-5));

    // empty state limit
    SlitMap none(CutDensity{});
    CHECK(omega(none, 0.3) == cplx(0.0));
}
