#pragma once

// Analytic Morse functions on S^1 and S^2 with exactly two nondegenerate
// critical points: trigonometric polynomials, height functions, and the
// support-flow functions f = omega . v attached to a convex body.  Carries
// the critical data and, on S^2, an exact parametrization of level curves.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "poincare/geometry.hpp"

namespace poincare {
namespace coarea {

using geom::SupportBody;
using geom::Vec;
using cplx = std::complex<double>;

class SphereFunction {
  public:
    // ---- constructors ----

    // f(phi) = c0 + sum_k (a[k-1] cos k phi + b[k-1] sin k phi) on S^1
    static SphereFunction s1_trig(double c0, std::vector<double> a, std::vector<double> b) {
        SphereFunction f;
        f.sdim_ = 1;
        f.kind_ = Kind::trig;
        f.c0_ = c0;
        f.a_ = std::move(a);
        f.b_ = std::move(b);
        if (f.b_.size() < f.a_.size()) f.b_.resize(f.a_.size(), 0.0);
        if (f.a_.size() < f.b_.size()) f.a_.resize(f.b_.size(), 0.0);
        f.find_critical_s1();
        return f;
    }
    static SphereFunction s1_cos() { return s1_trig(0.0, {1.0}, {}); }

    // f(phi) = omega . v(phi) for a 2-d body, omega at angle w
    static SphereFunction s1_omega_v(const SupportBody& b, double w) {
        if (b.dim() != 2) throw std::domain_error("s1_omega_v: 2-d body required");
        SphereFunction f;
        f.sdim_ = 1;
        f.kind_ = Kind::omega_v;
        f.body_ = b;
        f.omega_angle_ = w;
        f.find_critical_s1();
        return f;
    }

    // f(theta) = u . theta on S^2, |u| = 1
    static SphereFunction s2_height(const Vec& u) {
        SphereFunction f;
        f.sdim_ = 2;
        f.kind_ = Kind::height;
        f.axis_ = u;
        double n = geom::norm(f.axis_);
        for (auto& c : f.axis_) c /= n;
        f.min_ = -1.0;
        f.max_ = 1.0;
        f.make_frame();
        return f;
    }

    // f(theta) = omega . v(theta) for a 3-d ellipsoid body
    static SphereFunction s2_omega_v(const SupportBody& b, const Vec& omega) {
        if (b.dim() != 3) throw std::domain_error("s2_omega_v: 3-d body required");
        if (b.family() != geom::Family::ellipsoid && b.family() != geom::Family::ball)
            throw std::domain_error("s2_omega_v: ball/ellipsoid families only in d = 3");
        SphereFunction f;
        f.sdim_ = 2;
        f.kind_ = Kind::omega_v;
        f.body_ = b;
        Vec w = omega;
        double n = geom::norm(w);
        for (auto& c : w) c /= n;
        f.omega3_ = w;
        // sigma-space axis e = A omega / |A omega|; f(theta(sigma)) = (A omega) . sigma
        const auto& A = (b.family() == geom::Family::ellipsoid) ? b.ellipsoid_matrix()
                                                                : geom::Mat::identity(3);
        geom::Mat Ar = A;
        if (b.family() == geom::Family::ball) {
            Ar = geom::Mat::identity(3);
            for (int i = 0; i < 3; ++i) Ar(i, i) = b.ball_radius();
        }
        f.A3_ = Ar;
        f.A3inv_ = geom::sym_inverse(Ar);
        Vec Aw = Ar.apply(w);
        f.axis_scale_ = geom::norm(Aw);
        f.axis_ = Aw;
        for (auto& c : f.axis_) c /= f.axis_scale_;
        f.min_ = -b.support({-w[0], -w[1], -w[2]});
        f.max_ = b.support(w);
        f.make_frame();
        return f;
    }

    int sphere_dim() const { return sdim_; }
    int ambient_dim() const { return sdim_ + 1; }
    double min_value() const { return min_; }
    double max_value() const { return max_; }
    // endpoint exponent (d-3)/2 of the level density
    double density_exponent() const { return 0.5 * (ambient_dim() - 3); }

    // ---- S^1 interface ----

    double phi_min() const { return phi_min_; }
    double phi_max() const { return phi_max_; }

    // f, f', f'' at real phi
    std::array<double, 3> eval1(double phi) const {
        switch (kind_) {
            case Kind::trig: {
                double f = c0_, fp = 0, fpp = 0;
                for (size_t k = 1; k <= a_.size(); ++k) {
                    double kk = double(k), c = std::cos(kk * phi), s = std::sin(kk * phi);
                    f += a_[k - 1] * c + b_[k - 1] * s;
                    fp += kk * (-a_[k - 1] * s + b_[k - 1] * c);
                    fpp += kk * kk * (-a_[k - 1] * c - b_[k - 1] * s);
                }
                return {f, fp, fpp};
            }
            case Kind::omega_v: {
                auto j = body_->hhat_jet<3>(phi);
                double h = j.value(), hp = j.derivative(1), hpp = j.derivative(2), hppp = j.derivative(3);
                double c = std::cos(phi), s = std::sin(phi);
                double co = std::cos(omega_angle_), so = std::sin(omega_angle_);
                double ot = co * c + so * s;        // omega . theta
                double otp = -co * s + so * c;      // omega . theta_perp
                double f = h * ot + hp * otp;       // omega . v
                double curv = h + hpp;
                double fp = curv * otp;
                double fpp = (hp + hppp) * otp - curv * ot;
                return {f, fp, fpp};
            }
            default: throw std::domain_error("eval1: not an S^1 function");
        }
    }

    // f, f' at complex phi (analytic continuation)
    std::array<cplx, 2> eval1_c(cplx phi) const {
        switch (kind_) {
            case Kind::trig: {
                cplx f(c0_), fp(0);
                for (size_t k = 1; k <= a_.size(); ++k) {
                    double kk = double(k);
                    cplx c = std::cos(kk * phi), s = std::sin(kk * phi);
                    f += a_[k - 1] * c + b_[k - 1] * s;
                    fp += kk * (-a_[k - 1] * s + b_[k - 1] * c);
                }
                return {f, fp};
            }
            case Kind::omega_v: {
                auto h3 = body_->hhat_complex(phi);
                cplx h = h3[0], hp = h3[1], hpp = h3[2];
                cplx c = std::cos(phi), s = std::sin(phi);
                double co = std::cos(omega_angle_), so = std::sin(omega_angle_);
                cplx ot = co * c + so * s, otp = -co * s + so * c;
                return {h * ot + hp * otp, (h + hpp) * otp};
            }
            default: throw std::domain_error("eval1_c: not an S^1 function");
        }
    }

    // trig coefficient view when available (complexification data of the type)
    bool has_trig_coefficients() const { return kind_ == Kind::trig; }

    // ---- S^2 interface ----

    double eval2(const Vec& th) const {
        switch (kind_) {
            case Kind::height: return geom::dot(axis_, th);
            case Kind::omega_v: return geom::dot(omega3_, body_->grad_support(th));
            default: throw std::domain_error("eval2: not an S^2 function");
        }
    }
    // tangential gradient at th
    Vec grad2(const Vec& th) const {
        Vec g(3);
        switch (kind_) {
            case Kind::height: g = axis_; break;
            case Kind::omega_v: {
                // d(omega . v)[u] = omega . Dv[u]; assemble from a frame
                Vec e1 = tangent1(th), e2 = tangent2(th);
                double g1 = geom::dot(omega3_, body_->dv(th, e1));
                double g2 = geom::dot(omega3_, body_->dv(th, e2));
                for (int i = 0; i < 3; ++i) g[i] = g1 * e1[i] + g2 * e2[i];
                return g;
            }
            default: throw std::domain_error("grad2: not an S^2 function");
        }
        double p = geom::dot(g, th);
        Vec r(3);
        for (int i = 0; i < 3; ++i) r[i] = g[i] - p * th[i];
        return r;
    }

    // exact level-curve parametrization: point theta(alpha) with f = tau
    Vec level_point(double tau, double alpha) const {
        if (kind_ == Kind::height) {
            double c = tau;
            double s = std::sqrt(std::max(0.0, 1.0 - c * c));
            Vec th(3);
            for (int i = 0; i < 3; ++i)
                th[i] = c * axis_[i] + s * (frame1_[i] * std::cos(alpha) + frame2_[i] * std::sin(alpha));
            return th;
        }
        // omega_v: circle in sigma space, theta = A^{-1} sigma / |A^{-1} sigma|
        double c = tau / axis_scale_;
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        Vec sig(3);
        for (int i = 0; i < 3; ++i)
            sig[i] = c * axis_[i] + s * (frame1_[i] * std::cos(alpha) + frame2_[i] * std::sin(alpha));
        Vec u = A3inv_.apply(sig);
        double n = geom::norm(u);
        for (auto& x : u) x /= n;
        return u;
    }
    // |d theta / d alpha| along the level curve
    double level_speed(double tau, double alpha) const {
        if (kind_ == Kind::height) return std::sqrt(std::max(0.0, 1.0 - tau * tau));
        double c = tau / axis_scale_;
        double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        Vec sig(3), dsig(3);
        for (int i = 0; i < 3; ++i) {
            sig[i] = c * axis_[i] + s * (frame1_[i] * std::cos(alpha) + frame2_[i] * std::sin(alpha));
            dsig[i] = s * (-frame1_[i] * std::sin(alpha) + frame2_[i] * std::cos(alpha));
        }
        Vec u = A3inv_.apply(sig), du = A3inv_.apply(dsig);
        double n = geom::norm(u);
        double un = geom::dot(u, du) / (n * n * n);
        Vec d(3);
        for (int i = 0; i < 3; ++i) d[i] = du[i] / n - u[i] * un;
        return geom::norm(d);
    }

    const Vec& axis() const { return axis_; }

  private:
    enum class Kind { trig, omega_v, height };

    void find_critical_s1() {
        const int n = 8192;
        std::vector<double> fp(n);
        for (int i = 0; i < n; ++i) fp[i] = eval1(2.0 * M_PI * i / n)[1];
        std::vector<double> roots;
        for (int i = 0; i < n; ++i) {
            int k = (i + 1) % n;
            if (fp[i] == 0.0) roots.push_back(2.0 * M_PI * i / n);
            if (fp[i] * fp[k] < 0) {
                double lo = 2.0 * M_PI * i / n, hi = 2.0 * M_PI * (i + 1) / n;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (eval1(mid)[1] * eval1(lo)[1] <= 0 ? hi : lo) = mid;
                }
                roots.push_back(0.5 * (lo + hi));
            }
        }
        if (roots.size() != 2)
            throw validation_error("SphereFunction: not a Morse function with exactly two critical points");
        for (double r : roots) {
            auto e = eval1(r);
            if (std::abs(e[2]) < 1e-10)
                throw validation_error("SphereFunction: degenerate critical point");
        }
        auto e0 = eval1(roots[0]), e1 = eval1(roots[1]);
        if (e0[0] < e1[0]) {
            phi_min_ = roots[0];
            phi_max_ = roots[1];
            min_ = e0[0];
            max_ = e1[0];
        } else {
            phi_min_ = roots[1];
            phi_max_ = roots[0];
            min_ = e1[0];
            max_ = e0[0];
        }
    }

    void make_frame() {
        frame1_ = (std::abs(axis_[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
        double p = geom::dot(frame1_, axis_);
        for (int i = 0; i < 3; ++i) frame1_[i] -= p * axis_[i];
        double n = geom::norm(frame1_);
        for (auto& c : frame1_) c /= n;
        frame2_ = {axis_[1] * frame1_[2] - axis_[2] * frame1_[1],
                   axis_[2] * frame1_[0] - axis_[0] * frame1_[2],
                   axis_[0] * frame1_[1] - axis_[1] * frame1_[0]};
    }

    static Vec tangent1(const Vec& th) {
        Vec e1 = (std::abs(th[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
        double p = geom::dot(e1, th);
        for (int i = 0; i < 3; ++i) e1[i] -= p * th[i];
        double n = geom::norm(e1);
        for (auto& c : e1) c /= n;
        return e1;
    }
    static Vec tangent2(const Vec& th) {
        Vec e1 = tangent1(th);
        return {th[1] * e1[2] - th[2] * e1[1], th[2] * e1[0] - th[0] * e1[2],
                th[0] * e1[1] - th[1] * e1[0]};
    }

    int sdim_ = 1;
    Kind kind_ = Kind::trig;
    double min_ = 0, max_ = 0;
    // S^1 data
    double c0_ = 0;
    std::vector<double> a_, b_;
    std::optional<SupportBody> body_;
    double omega_angle_ = 0;
    double phi_min_ = 0, phi_max_ = 0;
    // S^2 data
    Vec axis_, frame1_, frame2_, omega3_;
    geom::Mat A3_, A3inv_;
    double axis_scale_ = 1.0;
};

// integrand G: complex-valued, complex-argument capable on S^1
using G1 = std::function<cplx(cplx)>;
// integrand on S^2 (real points only)
using G2 = std::function<cplx(const Vec&)>;

} // namespace coarea
} // namespace poincare
