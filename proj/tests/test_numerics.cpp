#include <catch2/catch_amalgamated.hpp>

#include "poincare/chebyshev.hpp"
#include "poincare/jets.hpp"
#include "poincare/quadrature.hpp"

#include <cmath>
#include <complex>

using namespace poincare;

TEST_CASE("jet arithmetic reproduces derivatives of exp(-1/x)") {
    auto x = Jet<4>::variable(0.5);
    auto g = exp(-recip(x));
    // g(x) = exp(-1/x): g' = g/x^2, g'' = g (1/x^4 - 2/x^3)
    double v = std::exp(-2.0);
    CHECK(g.value() == Catch::Approx(v).epsilon(1e-14));
    CHECK(g.derivative(1) == Catch::Approx(v * 4.0).epsilon(1e-13));
    CHECK(g.derivative(2) == Catch::Approx(0.0).margin(1e-13));
    // g''' = g (u^6 - 6u^5 + 6u^4) with u = 1/x = 2
    CHECK(g.derivative(3) == Catch::Approx(v * (64.0 - 192.0 + 96.0)).epsilon(1e-12));
}

TEST_CASE("jet quotient matches finite differences") {
    auto f = [](double t) {
        auto x = Jet<5>::variable(t);
        return exp(-recip(x)) / (exp(-recip(x)) + exp(-recip(1.0 - x)));
    };
    double t0 = 0.37;
    auto j = f(t0);
    const double h = 1e-3;
    double fd1 = (f(t0 + h).value() - f(t0 - h).value()) / (2 * h);
    double fd2 = (f(t0 + h).value() - 2 * j.value() + f(t0 - h).value()) / (h * h);
    CHECK(j.derivative(1) == Catch::Approx(fd1).epsilon(1e-5));
    CHECK(j.derivative(2) == Catch::Approx(fd2).epsilon(1e-4));
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    auto r = gauss_legendre(12);
    double s = 0;
    for (int i = 0; i < 12; ++i) s += r.w[i] * std::pow(r.x[i], 10);
    CHECK(s == Catch::Approx(2.0 / 11.0).epsilon(1e-13));
    double w = 0;
    for (double wi : r.w) w += wi;
    CHECK(w == Catch::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Jacobi with weight (1-t^2)^{-1/2} gives Chebyshev moments") {
    auto r = gauss_jacobi(24, -0.5, -0.5);
    double s = 0;
    for (int i = 0; i < 24; ++i) s += r.w[i];
    CHECK(s == Catch::Approx(M_PI).epsilon(1e-13));
    double s2 = 0;
    for (int i = 0; i < 24; ++i) s2 += r.w[i] * r.x[i] * r.x[i];
    CHECK(s2 == Catch::Approx(M_PI / 2).epsilon(1e-13));
}

TEST_CASE("Gauss-Jacobi (1-t^2)^{1/2} normalization") {
    auto r = gauss_jacobi(24, 0.5, 0.5);
    double s = 0;
    for (int i = 0; i < 24; ++i) s += r.w[i];
    CHECK(s == Catch::Approx(M_PI / 2).epsilon(1e-13));
}

TEST_CASE("Chebyshev fit evaluates and continues 1/(2-x)") {
    auto f = [](double x) { return 1.0 / (2.0 - x); };
    auto s = cheb_fit(f, -1.0, 1.0, 48);
    CHECK(s.eval_real(0.3) == Catch::Approx(f(0.3)).epsilon(1e-13));
    // complex continuation against the closed form
    cplx z(0.2, 0.35);
    cplx expect = 1.0 / (2.0 - z);
    CHECK(std::abs(s.eval(z) - expect) < 1e-10);
    // derivative series
    auto d = s.derivative();
    CHECK(d.eval_real(0.1) == Catch::Approx(1.0 / (1.9 * 1.9)).epsilon(1e-11));
    CHECK(s.certified_rho(1e-9) > 1.2);
}

TEST_CASE("periodic trapezoid is spectral") {
    auto f = [](double t) { return 1.0 / (2.0 + std::cos(t)); };
    double v = integrate_periodic(f, 64);
    CHECK(v == Catch::Approx(2.0 * M_PI / std::sqrt(3.0)).epsilon(1e-13));
}
