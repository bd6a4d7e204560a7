#pragma once

// Gaussian quadrature rules (Legendre and Jacobi) via Golub–Welsch, plus the
// periodic trapezoid rule.  Rules are cached per (kind, n) since node counts
// repeat heavily across the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace poincare {

struct QuadRule {
    std::vector<double> x; // nodes
    std::vector<double> w; // weights
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix (diag d, off-diag e) together
// with the first component of each normalized eigenvector, by implicit-shift
// QL (tqli).  d and z are outputs; e is clobbered.
inline void tridiag_eigen_first(std::vector<double>& d, std::vector<double>& e,
                                std::vector<double>& z) {
    const int n = int(d.size());
    z.assign(n, 0.0);
    if (n == 0) return;
    z[0] = 1.0;
    e.resize(n, 0.0); // e[i] couples i and i+1; e[n-1] sentinel
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (iter++ == 80) throw std::runtime_error("tridiag_eigen: no convergence");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? r : -r));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    double t = z[i + 1];
                    z[i + 1] = s * z[i] + c * t;
                    z[i] = c * z[i] - s * t;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });
    std::vector<double> d2(n), z2(n);
    for (int i = 0; i < n; ++i) {
        d2[i] = d[idx[i]];
        z2[i] = z[idx[i]];
    }
    d = d2;
    z = z2;
}

} // namespace detail

// n-point Gauss–Legendre on [-1,1]
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> d(n, 0.0), e(std::max(n - 1, 0)), z;
    for (int k = 1; k < n; ++k) e[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    detail::tridiag_eigen_first(d, e, z);
    QuadRule r;
    r.x = d;
    r.w.resize(n);
    for (int i = 0; i < n; ++i) r.w[i] = 2.0 * z[i] * z[i];
    return cache.emplace(n, std::move(r)).first->second;
}

// n-point Gauss–Jacobi for weight (1-x)^alpha (1+x)^beta on [-1,1]
inline const QuadRule& gauss_jacobi(int n, double alpha, double beta) {
    static std::map<std::tuple<int, double, double>, QuadRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_tuple(n, alpha, beta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (alpha <= -1.0 || beta <= -1.0) throw std::domain_error("gauss_jacobi: exponents must be > -1");
    std::vector<double> d(n), e(std::max(n - 1, 0)), z;
    const double ab = alpha + beta;
    d[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        d[k] = (beta * beta - alpha * alpha) / den;
    }
    for (int k = 1; k < n; ++k) {
        double b2;
        if (k == 1)
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                 ((2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0));
        e[k - 1] = std::sqrt(b2);
    }
    detail::tridiag_eigen_first(d, e, z);
    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                          std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
    QuadRule r;
    r.x = d;
    r.w.resize(n);
    for (int i = 0; i < n; ++i) r.w[i] = mu0 * z[i] * z[i];
    return cache.emplace(key, std::move(r)).first->second;
}

// integrate f over [a,b] with an n-point Gauss-Legendre rule
template <typename F>
auto integrate_gl(F&& f, double a, double b, int n) {
    const QuadRule& r = gauss_legendre(n);
    using R = decltype(f(a));
    R s{};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) s += R(r.w[i] * h) * f(c + h * r.x[i]);
    return s;
}

// periodic trapezoid over [0, 2pi) with n nodes (spectral for periodic analytic f)
template <typename F>
auto integrate_periodic(F&& f, int n) {
    using R = decltype(f(0.0));
    R s{};
    const double h = 2.0 * M_PI / n;
    for (int i = 0; i < n; ++i) s += f(i * h);
    return R(h) * s;
}

} // namespace poincare
