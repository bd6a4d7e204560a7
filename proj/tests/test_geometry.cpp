#include <catch2/catch_amalgamated.hpp>

#include "poincare/geometry.hpp"

#include <cmath>
#include <random>

using namespace poincare;
using namespace poincare::geom;

namespace {

SupportBody disc() { return SupportBody::ball(2, 1.0); }
SupportBody ellipse12() { return SupportBody::ellipsoid_diag({1.0, 2.0}); }
SupportBody wavy() { return SupportBody::trig2d(1.0, {0.0, 0.1}, {}); } // 1 + 0.1 cos 3phi

// boundary-sampling oracle for the support function
double support_oracle(const SupportBody& b, const Vec& xi) {
    double best = -1e300;
    for (int i = 0; i < 200000; ++i) {
        double phi = 2.0 * M_PI * i / 200000;
        auto p = b.boundary2d(phi);
        best = std::max(best, xi[0] * p[0] + xi[1] * p[1]);
    }
    return best;
}

} // namespace

TEST_CASE("support function closed forms and oracle") {
    CHECK(support(disc(), {3, 4}) == Catch::Approx(5.0).epsilon(1e-14));
    CHECK(support(ellipse12(), {0, 1}) == Catch::Approx(2.0).epsilon(1e-14));
    auto w = wavy();
    CHECK(support(w, {1, 0}) == Catch::Approx(1.1).epsilon(1e-13));
    CHECK(support(w, {1, 0}) == Catch::Approx(support_oracle(w, {1, 0})).epsilon(1e-8));
    Vec xi = {0.6, -1.7};
    CHECK(support(w, xi) == Catch::Approx(support_oracle(w, xi)).epsilon(1e-8));
    CHECK_THROWS_AS(support(disc(), {0, 0}), std::domain_error);
}

TEST_CASE("support homogeneity") {
    auto bodies = {disc(), ellipse12(), wavy()};
    for (const auto& b : bodies) {
        Vec xi = {0.3, -1.2};
        double h = support(b, xi);
        for (double t : {0.5, 2.0, 10.0}) {
            Vec txi = {t * xi[0], t * xi[1]};
            CHECK(std::abs(support(b, txi) - t * h) <= 1e-12 * t * h);
        }
    }
}

TEST_CASE("inverse Gauss map") {
    Vec th = {std::cos(0.7), std::sin(0.7)};
    auto v = inverse_gauss(disc(), th);
    CHECK(v[0] == Catch::Approx(th[0]).epsilon(1e-14));
    CHECK(v[1] == Catch::Approx(th[1]).epsilon(1e-14));
    // ellipsoid: v = A^2 theta / |A theta|
    auto v2 = inverse_gauss(ellipse12(), {0, 1});
    CHECK(v2[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(v2[1] == Catch::Approx(2.0).epsilon(1e-14));
    // trig2d at phi = 0: (hhat(0), hhat'(0)) = (1.1, 0)
    auto v3 = inverse_gauss(wavy(), {1, 0});
    CHECK(v3[0] == Catch::Approx(1.1).epsilon(1e-13));
    CHECK(v3[1] == Catch::Approx(0.0).margin(1e-13));
    CHECK_THROWS_AS(inverse_gauss(disc(), {1, 1}), std::domain_error);
}

TEST_CASE("Gauss map consistency: normal at v(theta) is theta") {
    for (const auto& b : {ellipse12(), wavy()}) {
        for (double phi0 : {0.3, 1.9, 4.4}) {
            Vec th = {std::cos(phi0), std::sin(phi0)};
            auto v = inverse_gauss(b, th);
            const double eps = 1e-5;
            auto vp = b.boundary2d(phi0 + eps);
            auto vm = b.boundary2d(phi0 - eps);
            // tangent-plane condition: theta . (v(phi±eps) - v(phi)) = O(eps^2)
            double up = th[0] * (vp[0] - v[0]) + th[1] * (vp[1] - v[1]);
            double um = th[0] * (vm[0] - v[0]) + th[1] * (vm[1] - v[1]);
            CHECK(std::abs(up) < 1e-8);
            CHECK(std::abs(um) < 1e-8);
        }
    }
}

TEST_CASE("support equals xi . v(xi/|xi|)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (const auto& b : {disc(), ellipse12(), wavy()}) {
        for (int k = 0; k < 20; ++k) {
            Vec xi = {U(rng), U(rng)};
            if (norm(xi) < 0.1) continue;
            Vec th = {xi[0] / norm(xi), xi[1] / norm(xi)};
            auto v = inverse_gauss(b, th);
            CHECK(std::abs(support(b, xi) - (xi[0] * v[0] + xi[1] * v[1])) < 1e-10 * (1 + support(b, xi)));
        }
    }
}

TEST_CASE("gauge: closed forms, duality, subadditivity") {
    CHECK(gauge(disc(), {1, 1}) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(gauge(ellipse12(), {0, 2}) == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(gauge(disc(), {0, 0}) == 0.0);
    // duality against |A^{-1} x| on random points
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    auto e = ellipse12();
    for (int k = 0; k < 25; ++k) {
        Vec x = {U(rng), U(rng)};
        CHECK(std::abs(gauge(e, x) - gauge_closed(e, x)) < 1e-8 * (1 + gauge_closed(e, x)));
    }
    // subadditivity and homogeneity on the trig body
    auto w = wavy();
    Vec x = {0.4, 0.9}, y = {-1.1, 0.5}, xy = {x[0] + y[0], x[1] + y[1]};
    CHECK(gauge(w, xy) <= gauge(w, x) + gauge(w, y) + 1e-11);
    Vec x3 = {3 * x[0], 3 * x[1]};
    CHECK(gauge(w, x3) == Catch::Approx(3 * gauge(w, x)).epsilon(1e-11));
}

TEST_CASE("gauge in d = 3") {
    auto e3 = SupportBody::ellipsoid_diag({1.0, 1.0, 2.0});
    CHECK(gauge(e3, {0, 0, 2}) == Catch::Approx(1.0).epsilon(1e-9));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (int k = 0; k < 8; ++k) {
        Vec x = {U(rng), U(rng), U(rng)};
        if (norm(x) < 0.2) continue;
        CHECK(std::abs(gauge(e3, x) - gauge_closed(e3, x)) < 1e-8 * (1 + gauge_closed(e3, x)));
    }
}

TEST_CASE("finsler distance") {
    CHECK(finsler_distance(disc(), ConvexTarget::point({0, 0}), {3, 4}) == Catch::Approx(5.0).epsilon(1e-12));
    // concentric disc target of radius 0.3
    auto t = ConvexTarget::body(SupportBody::ball(2, 0.3));
    CHECK(finsler_distance(disc(), t, {0, 2}) == Catch::Approx(1.7).epsilon(1e-9));
    CHECK(finsler_distance(ellipse12(), ConvexTarget::point({0, 0}), {0, 2}) == Catch::Approx(1.0).epsilon(1e-10));
    // monotone in K: bigger body, smaller distance
    double d1 = finsler_distance(SupportBody::ball(2, 1.0), ConvexTarget::point({0, 0}), {1.3, -0.4});
    double d2 = finsler_distance(SupportBody::ball(2, 2.0), ConvexTarget::point({0, 0}), {1.3, -0.4});
    CHECK(d2 < d1);
    // points inside the target are at distance zero
    CHECK(finsler_distance(disc(), t, {0.1, 0.0}) == 0.0);
}

TEST_CASE("geometric constants") {
    auto gc = geometric_constants(disc(), 128);
    // ball: |grad(omega . theta)| = sin(dist) >= (2/pi) dist
    CHECK(gc.c0 <= 1.0 + 1e-9);
    CHECK(gc.c0 >= 4.0 / (M_PI * M_PI) - 1e-6);
    auto gce = geometric_constants(ellipse12(), 128);
    CHECK(gce.c0 > 0.0);
    CHECK(gce.c0 <= 1.0);
    CHECK(gce.upper_check);
    CHECK_THROWS_AS(SupportBody::trig2d(1.0, {0.0, 0.4}, {}), validation_error); // hhat+hhat'' <= 0
}

TEST_CASE("omega coefficients") {
    Vec th = {std::cos(1.1), std::sin(1.1)};
    auto om = omega_coefficients(disc(), ConvexTarget::point({0, 0}), th);
    CHECK(om[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(om[1] == Catch::Approx(1.0).epsilon(1e-14));
    auto om2 = omega_coefficients(disc(), ConvexTarget::body(SupportBody::ball(2, 0.25)), th);
    CHECK(om2[0] == Catch::Approx(0.25).epsilon(1e-13));
    CHECK(om2[1] == Catch::Approx(1.0).epsilon(1e-13));
    // d = 3 ball/point: Omega = t^2 Vol_{S^2}
    Vec th3 = {0.2, -0.3, std::sqrt(1 - 0.04 - 0.09)};
    auto om3 = omega_coefficients(SupportBody::ball(3, 1.0), ConvexTarget::point({0, 0, 0}), th3);
    CHECK(om3[0] == Catch::Approx(0.0).margin(1e-13));
    CHECK(om3[1] == Catch::Approx(0.0).margin(1e-13));
    CHECK(om3[2] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed volumes") {
    // Vol(B + tB) = pi (1+t)^2
    auto c = minkowski_volume_poly(ConvexTarget::body(disc()), disc());
    REQUIRE(c.size() == 3);
    CHECK(c[0] == Catch::Approx(M_PI).epsilon(1e-10));
    CHECK(c[1] == Catch::Approx(2 * M_PI).epsilon(1e-10));
    CHECK(c[2] == Catch::Approx(M_PI).epsilon(1e-10));
    // point target: Vol(tK) = pi t^2
    auto cp = minkowski_volume_poly(ConvexTarget::point({0, 0}), disc());
    CHECK(cp[0] == Catch::Approx(0.0).margin(1e-10));
    CHECK(cp[1] == Catch::Approx(0.0).margin(1e-10));
    CHECK(cp[2] == Catch::Approx(M_PI).epsilon(1e-10));
    // d = 3 ball volume
    CHECK(body_volume(SupportBody::ball(3, 1.0)) == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-8));
    CHECK(body_volume(SupportBody::ellipsoid_diag({1.0, 1.0, 2.0})) ==
          Catch::Approx(8.0 * M_PI / 3.0).epsilon(1e-8));
}

TEST_CASE("omega / mixed volume consistency") {
    // \int Omega_l dVol = (l+1) V_{d-l-1}
    struct Case {
        SupportBody b;
        ConvexTarget t;
    };
    std::vector<Case> cases = {{disc(), ConvexTarget::point({0, 0})},
                               {disc(), ConvexTarget::body(SupportBody::ball(2, 0.25))},
                               {ellipse12(), ConvexTarget::body(SupportBody::ball(2, 0.3))},
                               {wavy(), ConvexTarget::point({0, 0})}};
    for (auto& cs : cases) {
        auto vp = minkowski_volume_poly(cs.t, cs.b);
        const int d = cs.b.dim();
        for (int l = 0; l < d; ++l) {
            double integral = integrate_periodic(
                [&](double phi) {
                    Vec th = {std::cos(phi), std::sin(phi)};
                    return omega_coefficients(cs.b, cs.t, th)[l];
                },
                1024);
            // coefficient of t^{l+1} in Vol is V_{d-l-1} = vp[l+1]
            CHECK(integral == Catch::Approx((l + 1) * vp[l + 1]).margin(1e-6 * (1 + std::abs(vp[l + 1]))));
        }
    }
    // a d = 3 spot check: ball/point
    auto b3 = SupportBody::ball(3, 1.0);
    auto t3 = ConvexTarget::point({0, 0, 0});
    auto vp3 = minkowski_volume_poly(t3, b3);
    const int npol = 32, naz = 64;
    const QuadRule& gl = gauss_legendre(npol);
    double s = 0;
    for (int i = 0; i < npol; ++i) {
        double pol = std::acos(gl.x[i]);
        for (int j = 0; j < naz; ++j) {
            double az = 2.0 * M_PI * j / naz;
            Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
            s += gl.w[i] * (2.0 * M_PI / naz) * omega_coefficients(b3, t3, th)[2];
        }
    }
    CHECK(s == Catch::Approx(3.0 * vp3[3]).epsilon(1e-8)); // = 3 V_0 = 4 pi
}
