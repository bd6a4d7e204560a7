#include <catch2/catch_amalgamated.hpp>

#include "poincare/coarea.hpp"

#include <cmath>
#include <random>

using namespace poincare;
using namespace poincare::coarea;
using poincare::geom::SupportBody;
using poincare::geom::Vec;

namespace {
const G1 one = [](cplx) { return cplx(1.0); };
const G2 one2 = [](const Vec&) { return cplx(1.0); };
}

TEST_CASE("density on S^1: f = cos") {
    auto f = SphereFunction::s1_cos();
    CHECK(density(f, one, 0.0).real() == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(density(f, one, 0.6).real() == Catch::Approx(2.5).epsilon(1e-12));
    CHECK(density(f, one, -0.9).real() == Catch::Approx(2.0 / std::sqrt(1.0 - 0.81)).epsilon(1e-12));
    CHECK_THROWS_AS(density(f, one, 1.0), std::domain_error);
    CHECK_THROWS_AS(density(f, one, -1.2), std::domain_error);
}

TEST_CASE("density on S^2: height and ellipsoid support flow") {
    auto f = SphereFunction::s2_height({0, 0, 1});
    for (double tau : {-0.7, 0.0, 0.4}) CHECK(density(f, one2, tau).real() == Catch::Approx(2 * M_PI).epsilon(1e-12));
    // marching cross-check (generic predictor-corrector path)
    CHECK(density_marching(f, one2, 0.3).real() == Catch::Approx(2 * M_PI).epsilon(1e-4));
    auto e = SupportBody::ellipsoid_diag({1.0, 1.0, 2.0});
    Vec w = {0.6, 0.0, 0.8};
    auto fe = SphereFunction::s2_omega_v(e, w);
    double tau = 0.3;
    CHECK(density_marching(fe, one2, tau).real() ==
          Catch::Approx(density(fe, one2, tau).real()).epsilon(2e-4));
}

TEST_CASE("density_fit reproduces closed forms") {
    auto f = SphereFunction::s1_cos();
    auto ld = density_fit(f, one, 0.1);
    for (double tau : {-0.9, -0.4, 0.0, 0.33, 0.85}) {
        double expect = 2.0 / std::sqrt(1.0 - tau * tau);
        CHECK(ld.eval_real(tau).real() == Catch::Approx(expect).epsilon(1e-10));
    }
    // S^2 height: constant density, only the degree-0 coefficient survives
    auto f3 = SphereFunction::s2_height({0, 0, 1});
    auto ld3 = density_fit(f3, one2, 0.1);
    for (const auto& p : ld3.pieces) {
        CHECK(std::abs(p.coef[0] - cplx(2 * M_PI)) < 1e-11);
        for (std::size_t k = 1; k < p.coef.size(); ++k) CHECK(std::abs(p.coef[k]) < 1e-12);
    }
    // exponent records
    CHECK(ld.rec_lo.exponent == Catch::Approx(-0.5).margin(0.02));
    CHECK(ld.rec_lo.prefactor == Catch::Approx(std::sqrt(2.0)).epsilon(1e-3));
    CHECK(ld3.rec_lo.exponent == Catch::Approx(0.0).margin(0.02));
    CHECK(ld3.rec_lo.prefactor == Catch::Approx(2 * M_PI).epsilon(1e-3));
}

TEST_CASE("critical exponents: G = sin^2 flips the sign") {
    auto f = SphereFunction::s1_cos();
    G1 gsin2 = [](cplx phi) { auto s = std::sin(phi); return s * s; };
    auto fit = critical_exponent(f, gsin2, true);
    CHECK(fit.exponent == Catch::Approx(0.5).margin(0.02));
    CHECK(fit.prefactor == Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(5e-3));
    // J = 2 sqrt(1 - tau^2): smooth interior model too
    auto ld = density_fit(f, gsin2, 0.1);
    CHECK(ld.eval_real(0.3).real() == Catch::Approx(2.0 * std::sqrt(1.0 - 0.09)).epsilon(1e-10));
}

TEST_CASE("density_continue: ellipse evaluation and root tracking agree") {
    auto f = SphereFunction::s1_cos();
    auto ld = density_fit(f, one, 0.1);
    // closed form 2/sqrt(1-z^2), branch continuous from the real interval
    cplx z(0.2, 0.1);
    cplx expect = 2.0 / std::sqrt(1.0 - z * z);
    CHECK(std::abs(ld.continue_at(z) - expect) < 1e-9);
    // real z: equals density
    CHECK(std::abs(ld.continue_at(cplx(0.37, 0)) - density(f, one, 0.37)) < 1e-11);
    // tracked method at points beyond the ellipse cap
    cplx z2(0.1, 0.35);
    cplx expect2 = 2.0 / std::sqrt(1.0 - z2 * z2);
    CHECK(std::abs(ld.tracked(z2, 0) - expect2) < 1e-9);
    // both methods agree where both apply
    for (cplx zz : {cplx(0.0, 0.05), cplx(-0.3, 0.03), cplx(0.42, -0.04)}) {
        int idx = ld.covering_piece(zz);
        REQUIRE(idx >= 0);
        CHECK(std::abs(ld.continue_at(zz) - ld.tracked(zz, 0)) < 1e-8);
    }
    // height on S^2: constant continuation
    auto f3 = SphereFunction::s2_height({0, 0, 1});
    auto ld3 = density_fit(f3, one2, 0.1);
    CHECK(std::abs(ld3.continue_at(cplx(0.3, 0.02)) - cplx(2 * M_PI)) < 1e-9);
    // never extrapolate silently
    CHECK_THROWS_AS(ld3.continue_at(cplx(0.3, 0.5)), numeric_error);
}

TEST_CASE("cauchy transform closed forms") {
    auto f = SphereFunction::s1_cos();
    auto ld = density_fit(f, one, 0.1);
    CHECK(std::abs(cauchy_transform(ld, cplx(2, 0)) - cplx(2 * M_PI / std::sqrt(3.0))) < 1e-10);
    auto f3 = SphereFunction::s2_height({0, 0, 1});
    auto ld3 = density_fit(f3, one2, 0.1);
    CHECK(std::abs(cauchy_transform(ld3, cplx(2, 0)) - cplx(2 * M_PI * std::log(3.0))) < 1e-9);
    // ell = 1 equals the numerically differentiated ell = 0
    cplx z(1.7, 0.4);
    const double h = 1e-5;
    cplx fd = (cauchy_transform(ld, z + h) - cauchy_transform(ld, z - h)) / (2 * h);
    CHECK(std::abs(cauchy_transform(ld, z, 1) - fd) < 1e-6 * (1.0 + std::abs(fd)));
    // near-singular guard
    CHECK_THROWS_AS(cauchy_transform(ld, cplx(0.5, 1e-12)), numeric_error);
}

TEST_CASE("coarea identity: direct integral equals cauchy transform") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> UX(-2.0, 2.0), UY(-1.2, 1.2);
    auto run = [&](const SphereFunction& f, auto g, double scale) {
        auto ld = density_fit(f, g, 0.08 * (f.max_value() - f.min_value()));
        int done = 0;
        while (done < 20) {
            cplx z(UX(rng) * scale, UY(rng) * scale);
            if (segment_distance(z, f.min_value(), f.max_value()) < 0.2) continue;
            ++done;
            cplx di = direct_integral(f, g, z);
            cplx ct = cauchy_transform(ld, z);
            CHECK(std::abs(di - ct) <= 1e-8 * (1.0 + std::abs(di)));
        }
        // and one each for ell = 1, 2
        for (int ell : {1, 2}) {
            cplx z(1.9 * scale, 0.35);
            cplx di = direct_integral(f, g, z, ell);
            cplx ct = cauchy_transform(ld, z, ell);
            CHECK(std::abs(di - ct) <= 1e-8 * (1.0 + std::abs(di)));
        }
    };
    run(SphereFunction::s1_cos(), one, 1.0);
    run(SphereFunction::s1_trig(0.0, {1.0, 0.2}, {}), one, 1.3);
    run(SphereFunction::s1_trig(0.0, {1.0}, {0.0, 0.15}), one, 1.2);
    run(SphereFunction::s2_height({0, 0, 1}), one2, 1.0);
    auto e = SupportBody::ellipsoid_diag({1.0, 1.0, 2.0});
    run(SphereFunction::s2_omega_v(e, {0.6, 0.0, 0.8}), one2, 1.8);
}

TEST_CASE("rotated direct integral") {
    // f = sin phi, z = 1: \int dphi/(1 - i sin phi) = 2 pi / sqrt 2
    auto f = SphereFunction::s1_trig(0.0, {}, {1.0});
    cplx v = direct_integral(f, one, cplx(1, 0), 0, true);
    CHECK(v.real() == Catch::Approx(2 * M_PI / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(std::abs(v.imag()) < 1e-10);
}

TEST_CASE("Plemelj jump") {
    auto f = SphereFunction::s1_cos();
    auto ld = density_fit(f, one, 0.1);
    cplx jump = plemelj_jump(ld, 0.0);
    CHECK(std::abs(jump - cplx(0, -4 * M_PI)) < 1e-6);
    auto f3 = SphereFunction::s2_height({0, 0, 1});
    auto ld3 = density_fit(f3, one2, 0.1);
    CHECK(std::abs(plemelj_jump(ld3, 0.5) - cplx(0, -4 * M_PI * M_PI)) < 1e-6);
    // zero integrand
    G1 zero = [](cplx) { return cplx(0.0); };
    auto ldz = density_fit(f, zero, 0.1);
    CHECK(std::abs(plemelj_jump(ldz, 0.2)) < 1e-12);
    // contract |jump + 2 pi i J| <= 1e-4 at several interior points
    for (double tau : {-0.5, -0.2, 0.1, 0.4, 0.6})
        CHECK(std::abs(plemelj_jump(ld, tau) + cplx(0, 2 * M_PI) * density(f, one, tau)) < 1e-4);
}

TEST_CASE("second sheet: closed form, calibration against contour, cut limits") {
    auto f = SphereFunction::s1_cos();
    auto ld = density_fit(f, one, 0.1);
    // continued value at z = 0.1i equals the other branch of 2 pi/sqrt(z^2-1)
    cplx z(0, 0.1);
    cplx sheet2 = second_sheet(ld, z);
    cplx direct = cauchy_transform(ld, z);
    cplx s = std::sqrt(z * z - 1.0);
    cplx v1 = 2.0 * M_PI / s, v2 = -v1;
    double d1 = std::min(std::abs(direct - v1), std::abs(direct - v2));
    CHECK(d1 < 1e-9);
    double d2 = std::min(std::abs(sheet2 - v1), std::abs(sheet2 - v2));
    CHECK(d2 < 1e-8);
    CHECK(std::abs(sheet2 - direct) > 1.0); // genuinely the other branch
    // the frozen orientation reproduces the contour-deformed evaluation
    for (cplx zz : {cplx(0.0, 0.1), cplx(0.15, 0.05), cplx(-0.2, 0.12)}) {
        cplx viac = cauchy_continued_contour(ld, zz);
        CHECK(std::abs(second_sheet(ld, zz) - viac) < 1e-8 * (1.0 + std::abs(viac)));
    }
    // no crossing: z below the axis, contour evaluation equals the direct one
    cplx zb(0.1, -0.15);
    CHECK(std::abs(cauchy_continued_contour(ld, zb) - cauchy_transform(ld, zb)) < 1e-8);
    // limit back onto the cut from above equals the sheet-1 limit from below
    double tau = 0.2;
    cplx above = second_sheet(ld, cplx(tau, 1e-4));
    cplx below = cauchy_transform(ld, cplx(tau, -1e-4));
    CHECK(std::abs(above - below) < 1e-3);
}

TEST_CASE("derivative growth of J stays factorially bounded") {
    // (|J^{(k)}(tau)|/k!)^{1/k} * dist(tau, crit) bounded over k <= 12
    auto body = SupportBody::trig2d(1.0, {0.0, 0.1}, {});
    auto f = SphereFunction::s1_omega_v(body, 0.4);
    auto ld = density_fit(f, one, 0.08 * (f.max_value() - f.min_value()));
    double worst_small = 0, worst_large = 0;
    for (double frac : {0.25, 0.5, 0.75}) {
        double tau = f.min_value() + frac * (f.max_value() - f.min_value());
        double dist = std::min(tau - f.min_value(), f.max_value() - tau);
        double fact = 1;
        for (int k = 1; k <= 12; ++k) {
            fact *= k;
            double jk = std::abs(ld.tracked(cplx(tau, 0), k));
            double r = std::pow(jk / fact, 1.0 / k) * dist;
            if (k <= 6)
                worst_small = std::max(worst_small, r);
            else
                worst_large = std::max(worst_large, r);
        }
    }
    CHECK(worst_large <= 2.0 * worst_small + 1e-12);
}
