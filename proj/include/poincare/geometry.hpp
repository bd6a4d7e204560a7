#pragma once

// Analytic strictly convex bodies represented by their support functions:
// h_K, the inverse Gauss map v = grad h_K, Minkowski gauges and Finsler
// distances, the geometric constants of the two-critical-point structure,
// the Omega volume-form coefficients, and mixed volumes.
//
// Families: ball(r) in any dimension, ellipsoid(A) (K = A * unit ball, A spd)
// in any dimension, and trig2d bodies (support function a trigonometric
// polynomial with harmonics k >= 2) in dimension 2 only.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "poincare/jets.hpp"
#include "poincare/quadrature.hpp"

namespace poincare {

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace geom {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// --- small dense symmetric matrix helpers (dim <= 3 in practice) ---
struct Mat {
    int n = 0;
    std::vector<double> a; // row major
    Mat() = default;
    explicit Mat(int n_) : n(n_), a(n_ * n_, 0.0) {}
    double& operator()(int i, int j) { return a[i * n + j]; }
    double operator()(int i, int j) const { return a[i * n + j]; }
    static Mat identity(int n_) {
        Mat m(n_);
        for (int i = 0; i < n_; ++i) m(i, i) = 1.0;
        return m;
    }
    Vec apply(const Vec& x) const {
        Vec y(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) y[i] += a[i * n + j] * x[j];
        return y;
    }
    Mat mul(const Mat& o) const {
        Mat r(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) r(i, j) += (*this)(i, k) * o(k, j);
        return r;
    }
};

// Jacobi eigenvalues of a small symmetric matrix
inline std::vector<double> sym_eigenvalues(Mat m) {
    const int n = m.n;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline Mat sym_inverse(const Mat& m) {
    const int n = m.n;
    Mat inv = Mat::identity(n), a = m;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-14) throw numeric_error("sym_inverse: singular matrix");
        for (int j = 0; j < n; ++j) {
            std::swap(a.a[piv * n + j], a.a[col * n + j]);
            std::swap(inv.a[piv * n + j], inv.a[col * n + j]);
        }
        double d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a(r, col);
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

enum class Family { ball, ellipsoid, trig2d };

// Analytic strictly convex body given through its support function family.
class SupportBody {
  public:
    static SupportBody ball(int dim, double radius) {
        if (dim < 2) throw validation_error("ball: dim must be >= 2");
        if (!(radius > 0)) throw validation_error("ball: radius must be positive");
        SupportBody b;
        b.dim_ = dim;
        b.family_ = Family::ball;
        b.radius_ = radius;
        return b;
    }

    // K = A * (unit ball), A symmetric positive definite
    static SupportBody ellipsoid(const Mat& A) {
        SupportBody b;
        b.dim_ = A.n;
        if (b.dim_ < 2) throw validation_error("ellipsoid: dim must be >= 2");
        for (int i = 0; i < A.n; ++i)
            for (int j = 0; j < A.n; ++j)
                if (std::abs(A(i, j) - A(j, i)) > 1e-12)
                    throw validation_error("ellipsoid: matrix must be symmetric");
        auto ev = sym_eigenvalues(A);
        if (ev.front() <= 1e-12) throw validation_error("ellipsoid: matrix must be positive definite");
        b.family_ = Family::ellipsoid;
        b.A_ = A;
        b.M_ = A.mul(A);
        b.Ainv_ = sym_inverse(A);
        b.eig_min_ = ev.front();
        b.eig_max_ = ev.back();
        return b;
    }
    static SupportBody ellipsoid_diag(const std::vector<double>& diag) {
        Mat A(int(diag.size()));
        for (int i = 0; i < A.n; ++i) A(i, i) = diag[i];
        return ellipsoid(A);
    }

    // hhat(phi) = c0 + sum_{k>=2} a_k cos(k phi) + b_k sin(k phi); d = 2 only.
    // Harmonics start at k = 2: k = 1 terms translate the body.
    static SupportBody trig2d(double c0, const std::vector<double>& a,
                              const std::vector<double>& b) {
        SupportBody s;
        s.dim_ = 2;
        s.family_ = Family::trig2d;
        s.c0_ = c0;
        s.ak_ = a;
        s.bk_ = b;
        if (s.bk_.size() < s.ak_.size()) s.bk_.resize(s.ak_.size(), 0.0);
        if (s.ak_.size() < s.bk_.size()) s.ak_.resize(s.bk_.size(), 0.0);
        // strict convexity margin and h > 0 on a dense grid
        double minh = 1e300, mincurv = 1e300;
        for (int i = 0; i < 4096; ++i) {
            double phi = 2.0 * M_PI * i / 4096;
            auto j = s.hhat_jet<2>(phi);
            minh = std::min(minh, j.value());
            mincurv = std::min(mincurv, j.value() + j.derivative(2));
        }
        if (minh <= 1e-10)
            throw validation_error("trig2d: support function must be positive (0 in the interior)");
        if (mincurv <= 1e-10)
            throw validation_error("trig2d: hhat + hhat'' <= 0 somewhere (not strictly convex)");
        return s;
    }

    int dim() const { return dim_; }
    Family family() const { return family_; }
    double ball_radius() const { return radius_; }
    const Mat& ellipsoid_matrix() const { return A_; }
    double trig_c0() const { return c0_; }
    const std::vector<double>& trig_a() const { return ak_; }
    const std::vector<double>& trig_b() const { return bk_; }

    // ---- support function and its derivatives ----

    double support(const Vec& xi) const {
        double r = norm(xi);
        if (r == 0) throw std::domain_error("support: xi must be nonzero");
        switch (family_) {
            case Family::ball: return radius_ * r;
            case Family::ellipsoid: return norm(A_.apply(xi));
            case Family::trig2d: {
                double phi = std::atan2(xi[1], xi[0]);
                return r * hhat_jet<0>(phi).value();
            }
        }
        return 0;
    }

    // v(theta) = grad h_K(theta) (0-homogeneous; theta need not be unit here)
    Vec grad_support(const Vec& xi) const {
        double r = norm(xi);
        if (r == 0) throw std::domain_error("grad_support: xi must be nonzero");
        switch (family_) {
            case Family::ball: {
                Vec v = xi;
                for (auto& c : v) c *= radius_ / r;
                return v;
            }
            case Family::ellipsoid: {
                Vec Ax = A_.apply(xi);
                double n = norm(Ax);
                Vec v = M_.apply(xi);
                for (auto& c : v) c /= n;
                return v;
            }
            case Family::trig2d: {
                double phi = std::atan2(xi[1], xi[0]);
                auto j = hhat_jet<1>(phi);
                double h = j.value(), hp = j.derivative(1);
                double c = std::cos(phi), s = std::sin(phi);
                return {h * c - hp * s, h * s + hp * c};
            }
        }
        return {};
    }

    // ambient Hessian of h at unit theta (null along theta)
    Mat hessian_support(const Vec& theta) const {
        const int d = dim_;
        Mat H(d);
        switch (family_) {
            case Family::ball: {
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) H(i, j) = radius_ * ((i == j ? 1.0 : 0.0) - theta[i] * theta[j]);
                return H;
            }
            case Family::ellipsoid: {
                Vec Ax = A_.apply(theta);
                double n = norm(Ax);
                Vec Mx = M_.apply(theta);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) H(i, j) = (M_(i, j) - Mx[i] * Mx[j] / (n * n)) / n;
                return H;
            }
            case Family::trig2d: {
                double phi = std::atan2(theta[1], theta[0]);
                auto j2 = hhat_jet<2>(phi);
                double curv = j2.value() + j2.derivative(2);
                double c = std::cos(phi), s = std::sin(phi);
                // (h + h'') t t^T on the unit circle, t = theta^perp
                H(0, 0) = curv * s * s;
                H(0, 1) = -curv * s * c;
                H(1, 0) = -curv * s * c;
                H(1, 1) = curv * c * c;
                return H;
            }
        }
        return H;
    }

    // ---- 2-d specifics: hhat(phi) = h(cos phi, sin phi) ----

    template <std::size_t K>
    Jet<K> hhat_jet(double phi) const {
        if (dim_ != 2) throw std::domain_error("hhat: 2-d bodies only");
        switch (family_) {
            case Family::ball: return Jet<K>(radius_);
            case Family::ellipsoid: {
                // g(phi) = theta' A^2 theta, hhat = sqrt(g)
                auto p = Jet<K>::variable(phi);
                Jet<K> c = jet_cos(p), s = jet_sin(p);
                Jet<K> g = M_(0, 0) * (c * c) + (2.0 * M_(0, 1)) * (c * s) + M_(1, 1) * (s * s);
                return jet_sqrt(g);
            }
            case Family::trig2d: {
                auto p = Jet<K>::variable(phi);
                Jet<K> h(c0_);
                for (size_t k = 0; k < ak_.size(); ++k) {
                    double kk = double(k + 2);
                    h = h + ak_[k] * jet_cos(kk * p) + bk_[k] * jet_sin(kk * p);
                }
                return h;
            }
        }
        return Jet<K>(0.0);
    }

    // complex-phi evaluation of (hhat, hhat', hhat'') for analytic continuation
    std::array<std::complex<double>, 3> hhat_complex(std::complex<double> phi) const {
        using C = std::complex<double>;
        if (dim_ != 2) throw std::domain_error("hhat_complex: 2-d bodies only");
        switch (family_) {
            case Family::ball: return {C(radius_), C(0), C(0)};
            case Family::ellipsoid: {
                C c = std::cos(phi), s = std::sin(phi);
                C g = M_(0, 0) * c * c + 2.0 * M_(0, 1) * c * s + M_(1, 1) * s * s;
                C gp = -2.0 * M_(0, 0) * c * s + 2.0 * M_(0, 1) * (c * c - s * s) + 2.0 * M_(1, 1) * s * c;
                C gpp = 2.0 * (M_(1, 1) - M_(0, 0)) * (c * c - s * s) - 8.0 * M_(0, 1) * s * c;
                if (g.real() <= 0)
                    throw numeric_error("hhat_complex: left the principal branch domain");
                C h = std::sqrt(g);
                C hp = gp / (2.0 * h);
                C hpp = gpp / (2.0 * h) - gp * gp / (4.0 * g * h);
                return {h, hp, hpp};
            }
            case Family::trig2d: {
                C h(c0_), hp(0), hpp(0);
                for (size_t k = 0; k < ak_.size(); ++k) {
                    double kk = double(k + 2);
                    C ck = std::cos(kk * phi), sk = std::sin(kk * phi);
                    h += ak_[k] * ck + bk_[k] * sk;
                    hp += kk * (-ak_[k] * sk + bk_[k] * ck);
                    hpp += kk * kk * (-ak_[k] * ck - bk_[k] * sk);
                }
                return {h, hp, hpp};
            }
        }
        return {};
    }

    // boundary point by outward normal angle, v(phi), plus derivative in phi
    std::array<double, 2> boundary2d(double phi) const {
        auto j = hhat_jet<1>(phi);
        double h = j.value(), hp = j.derivative(1);
        double c = std::cos(phi), s = std::sin(phi);
        return {h * c - hp * s, h * s + hp * c};
    }
    std::array<double, 2> boundary2d_deriv(double phi) const {
        auto j = hhat_jet<2>(phi);
        double curv = j.value() + j.derivative(2);
        return {-curv * std::sin(phi), curv * std::cos(phi)};
    }

    // directional derivative of v at unit theta along tangent u (d = 3 families)
    Vec dv(const Vec& theta, const Vec& u) const {
        switch (family_) {
            case Family::ball: {
                Vec r = u;
                for (auto& c : r) c *= radius_;
                return r;
            }
            case Family::ellipsoid: {
                Vec Ax = A_.apply(theta);
                double n = norm(Ax);
                Vec Mu = M_.apply(u), Mx = M_.apply(theta);
                double c = dot(Mx, u) / (n * n * n);
                Vec r(dim_);
                for (int i = 0; i < dim_; ++i) r[i] = Mu[i] / n - Mx[i] * c;
                return r;
            }
            case Family::trig2d: {
                // interpret u as d(theta)/dphi = theta^perp * (u . theta^perp)
                double phi = std::atan2(theta[1], theta[0]);
                double tp[2] = {-std::sin(phi), std::cos(phi)};
                double comp = u[0] * tp[0] + u[1] * tp[1];
                auto d = boundary2d_deriv(phi);
                return {d[0] * comp, d[1] * comp};
            }
        }
        return {};
    }

    double max_boundary_norm() const {
        switch (family_) {
            case Family::ball: return radius_;
            case Family::ellipsoid: return eig_max_;
            case Family::trig2d: {
                double m = 0;
                for (int i = 0; i < 2048; ++i) {
                    auto p = boundary2d(2.0 * M_PI * i / 2048);
                    m = std::max(m, std::hypot(p[0], p[1]));
                }
                return m;
            }
        }
        return 0;
    }

  private:
    template <std::size_t K>
    static Jet<K> jet_sqrt(const Jet<K>& a) {
        Jet<K> r;
        if (a.c[0] <= 0) throw numeric_error("jet_sqrt: nonpositive value");
        r.c[0] = std::sqrt(a.c[0]);
        for (std::size_t k = 1; k <= K; ++k) {
            double s = 0;
            for (std::size_t i = 1; i < k; ++i) s += r.c[i] * r.c[k - i];
            r.c[k] = (a.c[k] - s) / (2.0 * r.c[0]);
        }
        return r;
    }
    template <std::size_t K>
    static Jet<K> jet_sin(const Jet<K>& a) {
        // sin/cos of a jet via simultaneous recursion
        Jet<K> s, c;
        s.c[0] = std::sin(a.c[0]);
        c.c[0] = std::cos(a.c[0]);
        for (std::size_t k = 1; k <= K; ++k) {
            double ss = 0, cc = 0;
            for (std::size_t i = 1; i <= k; ++i) {
                ss += double(i) * a.c[i] * c.c[k - i];
                cc -= double(i) * a.c[i] * s.c[k - i];
            }
            s.c[k] = ss / double(k);
            c.c[k] = cc / double(k);
        }
        return s;
    }
    template <std::size_t K>
    static Jet<K> jet_cos(const Jet<K>& a) {
        Jet<K> s, c;
        s.c[0] = std::sin(a.c[0]);
        c.c[0] = std::cos(a.c[0]);
        for (std::size_t k = 1; k <= K; ++k) {
            double ss = 0, cc = 0;
            for (std::size_t i = 1; i <= k; ++i) {
                ss += double(i) * a.c[i] * c.c[k - i];
                cc -= double(i) * a.c[i] * s.c[k - i];
            }
            s.c[k] = ss / double(k);
            c.c[k] = cc / double(k);
        }
        return c;
    }

    int dim_ = 2;
    Family family_ = Family::ball;
    double radius_ = 1.0;
    Mat A_, M_, Ainv_; // ellipsoid: A, A^2, A^{-1}
    double eig_min_ = 1.0, eig_max_ = 1.0;
    double c0_ = 1.0;
    std::vector<double> ak_, bk_;

    friend double gauge_closed(const SupportBody&, const Vec&);
};

// Target set: a point or an analytic strictly convex body.
class ConvexTarget {
  public:
    static ConvexTarget point(const Vec& x0) {
        ConvexTarget t;
        t.is_point_ = true;
        t.x0_ = x0;
        return t;
    }
    static ConvexTarget body(const SupportBody& b) {
        ConvexTarget t;
        t.is_point_ = false;
        t.body_ = b;
        return t;
    }

    bool is_point() const { return is_point_; }
    const Vec& point_coords() const { return x0_; }
    const SupportBody& as_body() const { return *body_; }
    int dim() const { return is_point_ ? int(x0_.size()) : body_->dim(); }

    // boundary parametrization x_{K0}(theta) (point: constant)
    Vec x(const Vec& theta) const {
        if (is_point_) return x0_;
        return body_->grad_support(theta);
    }
    // derivative of x along tangent u (zero for a point)
    Vec dx(const Vec& theta, const Vec& u) const {
        if (is_point_) return Vec(theta.size(), 0.0);
        return body_->dv(theta, u);
    }
    double support(const Vec& xi) const {
        if (is_point_) return dot(x0_, xi);
        return body_->support(xi);
    }
    double diameter_bound() const {
        if (is_point_) return 0.0;
        return 2.0 * body_->max_boundary_norm();
    }
    // membership test via the support inequality on a dense direction grid
    bool contains(const Vec& p, int grid = 512) const {
        if (is_point_) return false;
        int d = dim();
        if (d == 2) {
            for (int i = 0; i < grid; ++i) {
                double a = 2.0 * M_PI * i / grid;
                Vec th = {std::cos(a), std::sin(a)};
                if (dot(p, th) > body_->support(th) + 1e-12) return false;
            }
            return true;
        }
        for (int i = 0; i < grid / 8; ++i)
            for (int j = 0; j < grid / 4; ++j) {
                double pol = M_PI * (i + 0.5) / (grid / 8), az = 2.0 * M_PI * j / (grid / 4);
                Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
                if (dot(p, th) > body_->support(th) + 1e-12) return false;
            }
        return true;
    }

  private:
    bool is_point_ = true;
    Vec x0_;
    std::optional<SupportBody> body_;
};

// ---- operations ----

inline double support(const SupportBody& b, const Vec& xi) { return b.support(xi); }

inline Vec inverse_gauss(const SupportBody& b, const Vec& theta) {
    if (std::abs(norm(theta) - 1.0) > 1e-10)
        throw std::domain_error("inverse_gauss: theta must be a unit vector");
    return b.grad_support(theta);
}

// closed-form gauge h_{K°}(x) for ball/ellipsoid; used as oracle and fast path
inline double gauge_closed(const SupportBody& b, const Vec& x) {
    switch (b.family()) {
        case Family::ball: return norm(x) / b.ball_radius();
        case Family::ellipsoid: return norm(b.Ainv_.apply(x));
        default: throw std::domain_error("gauge_closed: no closed form for this family");
    }
}

// gauge(x) = sup_theta (x . theta)/h_K(theta); coarse grid then Newton on the
// stationarity condition, tolerance 1e-12 on the gradient.  The value (not the
// maximizer) is the contract.
inline double gauge(const SupportBody& b, const Vec& x) {
    if (norm(x) == 0) return 0.0;
    const int d = b.dim();
    if (d == 2) {
        auto qval = [&](double phi) {
            return (x[0] * std::cos(phi) + x[1] * std::sin(phi)) / b.hhat_jet<0>(phi).value();
        };
        double best = -1e300, bphi = 0;
        const int n0 = 256;
        for (int i = 0; i < n0; ++i) {
            double p = 2.0 * M_PI * i / n0;
            double q = qval(p);
            if (q > best) {
                best = q;
                bphi = p;
            }
        }
        double phi = bphi;
        bool converged = false;
        for (int it = 0; it < 80; ++it) {
            auto j = b.hhat_jet<2>(phi);
            double h = j.value(), hp = j.derivative(1), hpp = j.derivative(2);
            double c = std::cos(phi), s = std::sin(phi);
            double u = x[0] * c + x[1] * s, up = -x[0] * s + x[1] * c;
            double q1 = (up * h - u * hp) / (h * h);
            double q2 = (-u * h - u * hpp) / (h * h) - 2.0 * hp * (up * h - u * hp) / (h * h * h);
            if (std::abs(q1) < 1e-12 * (std::abs(u) / h + 1.0)) {
                converged = true;
                break;
            }
            if (q2 >= -1e-14 * (1.0 + std::abs(u) / h)) break; // not locally concave: keep grid value
            phi -= q1 / q2;
        }
        double q = qval(phi);
        if (q > best) best = q;
        if (!converged && b.family() != Family::ball) {
            // fall back to a finer grid before giving up
            const int n1 = 1 << 14;
            for (int i = 0; i < n1; ++i) best = std::max(best, qval(2.0 * M_PI * i / n1));
        }
        return best;
    }
    if (d == 3) {
        auto qval = [&](const Vec& th) { return dot(x, th) / b.support(th); };
        double best = -1e300;
        Vec bth = {0, 0, 1};
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 64; ++j) {
                double pol = M_PI * (i + 0.5) / 32, az = 2.0 * M_PI * j / 64;
                Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
                double q = qval(th);
                if (q > best) {
                    best = q;
                    bth = th;
                }
            }
        // finite-difference Newton in a tangent chart around the best point
        Vec th = bth;
        for (int it = 0; it < 60; ++it) {
            Vec e1 = (std::abs(th[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
            double p = dot(e1, th);
            for (int k = 0; k < 3; ++k) e1[k] -= p * th[k];
            double n1 = norm(e1);
            for (auto& c : e1) c /= n1;
            Vec e2 = {th[1] * e1[2] - th[2] * e1[1], th[2] * e1[0] - th[0] * e1[2],
                      th[0] * e1[1] - th[1] * e1[0]};
            auto at = [&](double a, double bb) {
                Vec p2(3);
                for (int k = 0; k < 3; ++k) p2[k] = th[k] + a * e1[k] + bb * e2[k];
                double nn = norm(p2);
                for (auto& c : p2) c /= nn;
                return qval(p2);
            };
            const double h = 1e-5;
            double f0 = at(0, 0);
            double ga = (at(h, 0) - at(-h, 0)) / (2 * h), gb = (at(0, h) - at(0, -h)) / (2 * h);
            double haa = (at(h, 0) - 2 * f0 + at(-h, 0)) / (h * h);
            double hbb = (at(0, h) - 2 * f0 + at(0, -h)) / (h * h);
            double hab = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
            double det = haa * hbb - hab * hab;
            if (std::abs(ga) + std::abs(gb) < 1e-12 * (1.0 + std::abs(f0))) break;
            double da, db;
            if (det > 1e-14 && haa < 0) {
                da = -(hbb * ga - hab * gb) / det;
                db = -(-hab * ga + haa * gb) / det;
            } else {
                da = 1e-2 * ga;
                db = 1e-2 * gb;
            }
            Vec nth(3);
            for (int k = 0; k < 3; ++k) nth[k] = th[k] + da * e1[k] + db * e2[k];
            double nn = norm(nth);
            for (auto& c : nth) c /= nn;
            th = nth;
            best = std::max(best, qval(th));
        }
        return best;
    }
    // higher dimensions exist only for ball/ellipsoid
    return gauge_closed(b, x);
}

// d_K(T, x) = inf_{y in T} gauge_K(x - y); zero when x lies in T
inline double finsler_distance(const SupportBody& b, const ConvexTarget& t, const Vec& x) {
    if (t.is_point()) {
        Vec u(x.size());
        for (size_t i = 0; i < x.size(); ++i) u[i] = x[i] - t.point_coords()[i];
        return gauge(b, u);
    }
    if (t.contains(x)) return 0.0;
    const SupportBody& tb = t.as_body();
    const int d = b.dim();
    if (d == 2) {
        auto dist_at = [&](double psi) {
            auto p = tb.boundary2d(psi);
            return gauge(b, {x[0] - p[0], x[1] - p[1]});
        };
        const int n0 = 128;
        double best = 1e300, bpsi = 0;
        for (int i = 0; i < n0; ++i) {
            double p = 2.0 * M_PI * i / n0;
            double v = dist_at(p);
            if (v < best) {
                best = v;
                bpsi = p;
            }
        }
        // golden-section refinement around the best grid node
        double a = bpsi - 2.0 * M_PI / n0, c = bpsi + 2.0 * M_PI / n0;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
        double f1 = dist_at(x1), f2 = dist_at(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - gr * (c - a);
                f1 = dist_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (c - a);
                f2 = dist_at(x2);
            }
        }
        return std::min(best, std::min(f1, f2));
    }
    if (d == 3) {
        auto dist_at = [&](double pol, double az) {
            Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
            Vec p = tb.grad_support(th);
            return gauge(b, {x[0] - p[0], x[1] - p[1], x[2] - p[2]});
        };
        double best = 1e300, bp = 0, ba = 0;
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 48; ++j) {
                double pol = M_PI * (i + 0.5) / 24, az = 2.0 * M_PI * j / 48;
                double v = dist_at(pol, az);
                if (v < best) {
                    best = v;
                    bp = pol;
                    ba = az;
                }
            }
        // local coordinate descent refinement
        double step = M_PI / 24;
        for (int it = 0; it < 60; ++it) {
            bool improved = false;
            for (auto [dp, da] : std::initializer_list<std::array<double, 2>>{
                     {step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
                double v = dist_at(bp + dp, ba + da);
                if (v < best) {
                    best = v;
                    bp += dp;
                    ba += da;
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
            if (step < 1e-9) break;
        }
        return best;
    }
    throw numeric_error("finsler_distance: unsupported dimension for body targets");
}

struct GeometricConstants {
    double c0 = 0;          // empirical constant of the two-sided bound
    bool upper_check = false;
    double worst_ratio_gradient = 0; // min |grad f|^2 / dist^2
    double worst_ratio_value = 0;    // min dist^2 / |f - f(crit)|
};

// Empirical constant c0 with |grad (omega . v)|^2 >= c0 dist(theta,{±omega})^2
// and |omega.v(theta) - omega.v(±omega)| <= dist^2 / c0, checked on a grid.
inline GeometricConstants geometric_constants(const SupportBody& b, int grid = 256) {
    const int d = b.dim();
    double min_grad_ratio = 1e300, min_val_ratio = 1e300;
    auto angdist = [](double a, double bb) {
        double r = std::fmod(std::abs(a - bb), 2.0 * M_PI);
        return std::min(r, 2.0 * M_PI - r);
    };
    if (d == 2) {
        for (int i = 0; i < grid; ++i) {
            double w = 2.0 * M_PI * i / grid;
            double co = std::cos(w), so = std::sin(w);
            // f(phi) = omega . v(phi); critical at phi = w and w + pi
            auto vmax = b.boundary2d(w);
            auto vmin = b.boundary2d(w + M_PI);
            double fmax = co * vmax[0] + so * vmax[1];
            double fmin = co * vmin[0] + so * vmin[1];
            for (int j = 0; j < grid; ++j) {
                double phi = 2.0 * M_PI * (j + 0.31) / grid; // avoid exact critical hits
                double dplus = angdist(phi, w), dminus = angdist(phi, w + M_PI);
                double dist = std::min(dplus, dminus);
                if (dist < 1e-6) continue;
                auto v = b.boundary2d(phi);
                auto vp = b.boundary2d_deriv(phi);
                double f = co * v[0] + so * v[1];
                double fp = co * vp[0] + so * vp[1];
                min_grad_ratio = std::min(min_grad_ratio, fp * fp / (dist * dist));
                double fc = (dplus < dminus) ? fmax : fmin;
                if (std::abs(f - fc) > 1e-14)
                    min_val_ratio = std::min(min_val_ratio, dist * dist / std::abs(f - fc));
            }
        }
    } else if (d == 3) {
        const int gw = std::max(8, grid / 16), gt = std::max(16, grid / 8);
        for (int iw = 0; iw < gw; ++iw)
            for (int jw = 0; jw < 2 * gw; ++jw) {
                double pol = M_PI * (iw + 0.5) / gw, az = 2.0 * M_PI * jw / (2 * gw);
                Vec w = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
                Vec vmaxp = b.grad_support(w);
                Vec wm = {-w[0], -w[1], -w[2]};
                Vec vminp = b.grad_support(wm);
                double fmax = dot(w, vmaxp), fmin = dot(w, vminp);
                for (int it = 0; it < gt; ++it)
                    for (int jt = 0; jt < 2 * gt; ++jt) {
                        double tp = M_PI * (it + 0.37) / gt, ta = 2.0 * M_PI * (jt + 0.21) / (2 * gt);
                        Vec th = {std::sin(tp) * std::cos(ta), std::sin(tp) * std::sin(ta), std::cos(tp)};
                        double cosang = std::clamp(dot(th, w), -1.0, 1.0);
                        double dplus = std::acos(cosang), dminus = M_PI - dplus;
                        double dist = std::min(dplus, dminus);
                        if (dist < 1e-4) continue;
                        // tangential gradient of f = w . v at th
                        Vec e1 = (std::abs(th[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
                        double pr = dot(e1, th);
                        for (int k = 0; k < 3; ++k) e1[k] -= pr * th[k];
                        double n1 = norm(e1);
                        for (auto& c : e1) c /= n1;
                        Vec e2 = {th[1] * e1[2] - th[2] * e1[1], th[2] * e1[0] - th[0] * e1[2],
                                  th[0] * e1[1] - th[1] * e1[0]};
                        double g1 = dot(w, b.dv(th, e1)), g2 = dot(w, b.dv(th, e2));
                        double grad2 = g1 * g1 + g2 * g2;
                        min_grad_ratio = std::min(min_grad_ratio, grad2 / (dist * dist));
                        double f = dot(w, b.grad_support(th));
                        double fc = (dplus < dminus) ? fmax : fmin;
                        if (std::abs(f - fc) > 1e-14)
                            min_val_ratio = std::min(min_val_ratio, dist * dist / std::abs(f - fc));
                    }
            }
    } else {
        throw std::domain_error("geometric_constants: d in {2,3} only");
    }
    GeometricConstants gc;
    gc.worst_ratio_gradient = min_grad_ratio;
    gc.worst_ratio_value = min_val_ratio;
    gc.c0 = std::min(min_grad_ratio, min_val_ratio);
    gc.upper_check = gc.c0 > 0;
    if (!(gc.c0 > 0)) throw numeric_error("geometric_constants: degenerate body (no positive c0)");
    return gc;
}

// Coefficients Omega_l(theta) of the density of the volume form Omega(t,theta)
// against the canonical sphere volume: Omega = sum_l Omega_l t^l Vol_{S^{d-1}}.
inline std::vector<double> omega_coefficients(const SupportBody& b, const ConvexTarget& t,
                                              const Vec& theta) {
    const int d = b.dim();
    if (d != 2 && d != 3) throw std::domain_error("omega_coefficients: d in {2,3} only");
    if (std::abs(norm(theta) - 1.0) > 1e-10)
        throw std::domain_error("omega_coefficients: theta must be a unit vector");
    if (d == 2) {
        double phi = std::atan2(theta[1], theta[0]);
        auto v = b.boundary2d(phi);
        auto vp = b.boundary2d_deriv(phi);
        double om1 = v[0] * vp[1] - v[1] * vp[0];
        double om0 = 0.0;
        if (!t.is_point()) {
            auto xp = t.as_body().boundary2d_deriv(phi);
            om0 = v[0] * xp[1] - v[1] * xp[0];
        }
        return {om0, om1};
    }
    // d = 3: Omega(t,theta) = v . (D_a(e1) x D_a(e2)), a = t v + x_{K0},
    // in the right-handed tangent frame (e1, e2 = theta x e1, theta)
    Vec e1 = (std::abs(theta[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
    double pr = dot(e1, theta);
    for (int k = 0; k < 3; ++k) e1[k] -= pr * theta[k];
    double n1 = norm(e1);
    for (auto& c : e1) c /= n1;
    Vec e2 = {theta[1] * e1[2] - theta[2] * e1[1], theta[2] * e1[0] - theta[0] * e1[2],
              theta[0] * e1[1] - theta[1] * e1[0]};
    Vec v = b.grad_support(theta);
    Vec dv1 = b.dv(theta, e1), dv2 = b.dv(theta, e2);
    Vec dx1 = t.dx(theta, e1), dx2 = t.dx(theta, e2);
    auto density_at = [&](double tt) {
        Vec a1(3), a2(3);
        for (int k = 0; k < 3; ++k) {
            a1[k] = tt * dv1[k] + dx1[k];
            a2[k] = tt * dv2[k] + dx2[k];
        }
        Vec cr = {a1[1] * a2[2] - a1[2] * a2[1], a1[2] * a2[0] - a1[0] * a2[2],
                  a1[0] * a2[1] - a1[1] * a2[0]};
        return dot(v, cr);
    };
    // quadratic in t: exact Vandermonde extraction at t = 0, 1, 2
    double f0 = density_at(0), f1 = density_at(1), f2 = density_at(2);
    double om2 = 0.5 * (f2 - 2 * f1 + f0);
    double om1 = f1 - f0 - om2;
    return {f0, om1, om2};
}

// Coefficients of Vol(K0 + tK) = sum_l t^l V_{d-l}: returns c with
// c[l] = V_{d-l} the coefficient of t^l, fitted through d+1 sampled volumes.
inline std::vector<double> minkowski_volume_poly(const ConvexTarget& t, const SupportBody& b) {
    const int d = b.dim();
    if (d != 2 && d != 3) throw std::domain_error("minkowski_volume_poly: d in {2,3} only");
    auto volume_at = [&](double tt) {
        if (d == 2) {
            auto f = [&](double phi) {
                auto j = b.hhat_jet<1>(phi);
                double h = tt * j.value(), hp = tt * j.derivative(1);
                if (t.is_point()) {
                    double c = std::cos(phi), s = std::sin(phi);
                    h += t.point_coords()[0] * c + t.point_coords()[1] * s;
                    hp += -t.point_coords()[0] * s + t.point_coords()[1] * c;
                } else {
                    auto j0 = t.as_body().hhat_jet<1>(phi);
                    h += j0.value();
                    hp += j0.derivative(1);
                }
                return 0.5 * (h * h - hp * hp);
            };
            return integrate_periodic(f, 1024);
        }
        // d = 3: Vol = (1/3) \int h_t det_2(Hess h_t |_{theta^perp}) dVol
        auto f = [&](double pol, double az) {
            Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
            Mat H = b.hessian_support(th);
            double h = tt * b.support(th);
            Mat H0(3);
            if (t.is_point()) {
                h += dot(t.point_coords(), th);
            } else {
                H0 = t.as_body().hessian_support(th);
                h += t.as_body().support(th);
            }
            Vec e1 = (std::abs(th[0]) < 0.9) ? Vec{1, 0, 0} : Vec{0, 1, 0};
            double pr = dot(e1, th);
            for (int k = 0; k < 3; ++k) e1[k] -= pr * th[k];
            double n1 = norm(e1);
            for (auto& c : e1) c /= n1;
            Vec e2 = {th[1] * e1[2] - th[2] * e1[1], th[2] * e1[0] - th[0] * e1[2],
                      th[0] * e1[1] - th[1] * e1[0]};
            auto w = [&](const Vec& u, const Vec& vv) {
                double s = 0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) s += u[i] * (tt * H(i, j) + H0(i, j)) * vv[j];
                return s;
            };
            double w11 = w(e1, e1), w12 = w(e1, e2), w22 = w(e2, e2);
            return h * (w11 * w22 - w12 * w12) / 3.0;
        };
        // Gauss-Legendre in cos(polar) x trapezoid in azimuth
        const int npol = 48, naz = 96;
        const QuadRule& gl = gauss_legendre(npol);
        double s = 0;
        for (int i = 0; i < npol; ++i) {
            double cp = gl.x[i];
            double pol = std::acos(cp);
            double rowsum = 0;
            for (int j = 0; j < naz; ++j) rowsum += f(pol, 2.0 * M_PI * j / naz);
            s += gl.w[i] * rowsum * (2.0 * M_PI / naz);
        }
        return s;
    };
    std::vector<double> ts, vols;
    for (int i = 0; i <= d; ++i) ts.push_back(0.5 + 0.5 * i);
    for (double tt : ts) vols.push_back(volume_at(tt));
    // solve the (d+1)x(d+1) Vandermonde system for polynomial coefficients
    int n = d + 1;
    std::vector<std::vector<double>> Mrows(n, std::vector<double>(n + 1));
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) {
            Mrows[i][j] = p;
            p *= ts[i];
        }
        Mrows[i][n] = vols[i];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(Mrows[r][col]) > std::abs(Mrows[piv][col])) piv = r;
        if (std::abs(Mrows[piv][col]) < 1e-12) throw numeric_error("minkowski_volume_poly: ill-conditioned fit");
        std::swap(Mrows[piv], Mrows[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = Mrows[r][col] / Mrows[col][col];
            for (int j = col; j <= n; ++j) Mrows[r][j] -= f * Mrows[col][j];
        }
    }
    std::vector<double> coef(n);
    for (int i = 0; i < n; ++i) coef[i] = Mrows[i][n] / Mrows[i][i];
    for (int i = 0; i < n; ++i)
        if (coef[i] < -1e-6) throw numeric_error("minkowski_volume_poly: negative fitted volume coefficient");
    return coef;
}

// Vol(K) itself (leading mixed-volume coefficient)
inline double body_volume(const SupportBody& b) {
    auto c = minkowski_volume_poly(ConvexTarget::point(Vec(b.dim(), 0.0)), b);
    return c.back();
}

} // namespace geom
} // namespace poincare
