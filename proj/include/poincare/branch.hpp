#pragma once

// Determinations of ln and sqrt, the singular model functions F_gamma with
// closed forms and recurrence, contour-deformed evaluation with branch
// tracking of (1-t^2)^gamma, and analytic continuation of F_{(d-3)/2} along
// paths with monodromy bookkeeping.
//
// Orientation convention (recorded, not taken from the literature):
// counterclockwise loops are positive.  A counterclockwise loop around +1
// shifts F_{(d-3)/2} by -2 pi i (1-zeta^2)^{(d-3)/2} for odd d; around -1 the
// shift is +2 pi i (1-zeta^2)^{(d-3)/2}.  For even d a loop around either
// branch point flips the sign of the singular part.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "poincare/geometry.hpp" // numeric_error
#include "poincare/quadrature.hpp"

namespace poincare {
namespace branch {

using cplx = std::complex<double>;

// ln with the determination cut along e^{-i theta} R_-; real on R_+
inline cplx log_det(double theta, cplx z) {
    cplx w = std::exp(cplx(0, theta)) * z;
    if (w.imag() == 0.0 && w.real() <= 0.0)
        throw std::domain_error("log_det: z on the determination cut");
    return std::log(w) - cplx(0, theta);
}

inline cplx sqrt_det(double theta, cplx z) { return std::exp(0.5 * log_det(theta, z)); }

// C_gamma = \int_{-1}^1 (1-t^2)^gamma dt
inline double c_gamma(double gamma) {
    const QuadRule& r = gauss_jacobi(64, gamma, gamma);
    double s = 0;
    for (double w : r.w) s += w;
    return s;
}

// F_gamma(zeta) = \int_{-1}^1 (1-t^2)^gamma / (zeta - t) dt by Gauss-Jacobi,
// node count doubled until two successive results agree to 1e-12
inline cplx F_quadrature(double gamma, cplx zeta) {
    if (!(gamma > -1.0)) throw std::domain_error("F_quadrature: gamma must be > -1");
    double x = std::clamp(zeta.real(), -1.0, 1.0);
    if (std::abs(zeta - cplx(x, 0)) < 1e-10)
        throw numeric_error("F_quadrature: zeta too close to [-1,1]");
    cplx prev{};
    for (int n = 200; n <= 6400; n *= 2) {
        const QuadRule& r = gauss_jacobi(n, gamma, gamma);
        cplx s{};
        for (int i = 0; i < n; ++i) s += r.w[i] / (zeta - r.x[i]);
        if (n > 200 && std::abs(s - prev) <= 1e-12 * (1.0 + std::abs(s))) return s;
        prev = s;
    }
    return prev;
}

// P_d from the recurrence F_{gamma+1} = (1-z^2) F_gamma + C_gamma z,
// with P_2 = P_3 = 0 (the singular part absorbs the (1-z^2) factor)
inline std::vector<double> P_d_coefficients(int d) {
    if (d < 2) throw std::domain_error("P_d: d >= 2 required");
    std::vector<double> p = {0.0}; // P_2 or P_3
    for (int dd = (d % 2 == 0) ? 2 : 3; dd < d; dd += 2) {
        // multiply by (1 - z^2) and add C_{(dd-3)/2} z
        std::vector<double> q(p.size() + 2, 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            q[k] += p[k];
            q[k + 2] -= p[k];
        }
        if (q.size() < 2) q.resize(2, 0.0);
        q[1] += c_gamma(0.5 * (dd - 3));
        p = std::move(q);
    }
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
    return p;
}

inline cplx eval_poly(const std::vector<double>& p, cplx z) {
    cplx s{};
    for (std::size_t k = p.size(); k-- > 0;) s = s * z + p[k];
    return s;
}

// singular part of F_{(d-3)/2} with the determination theta
inline cplx F_singular(int d, cplx zeta, double theta = 0.0) {
    int k2 = d - 3; // exponent (d-3)/2 doubled
    if (d % 2 == 1) {
        cplx pw = std::pow(1.0 - zeta * zeta, double(k2) / 2.0); // integer power
        return pw * (log_det(theta, zeta + 1.0) - log_det(theta, zeta - 1.0));
    }
    double sgn = ((d - 2) / 2) % 2 == 0 ? 1.0 : -1.0;
    cplx sp = sqrt_det(theta, zeta + 1.0), sm = sqrt_det(theta, zeta - 1.0);
    return sgn * M_PI * std::pow(sp, double(k2)) * std::pow(sm, double(k2));
}

// closed form F_{(d-3)/2} = singular part + P_d on the sheet containing R_+
inline cplx F_closed(int d, cplx zeta, double theta = 0.0) {
    return F_singular(d, zeta, theta) + eval_poly(P_d_coefficients(d), zeta);
}

// least-squares recovery of P_d = F_quadrature - F_singular on samples in (2,5);
// coefficients snapped to small rationals (optionally times pi) when within 1e-9
struct PdExtract {
    std::vector<double> raw;      // fitted coefficients
    std::vector<double> rounded;  // after rational / rational*pi snapping
    double residual = 0;
};

inline PdExtract P_d_extract(int d) {
    if (d > 9) throw std::domain_error("P_d_extract: d <= 9 only");
    const int deg = std::max(1, d - 3); // true degree of P_d is d-3 (d>=4)
    const int m = std::max(2 * d, deg + 3);
    std::vector<double> zs(m);
    for (int i = 0; i < m; ++i) zs[i] = 2.0 + 3.0 * (i + 0.5) / m;
    // Vandermonde least squares via normal equations (small, well-scaled)
    int n = deg + 1;
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    std::vector<double> ys(m);
    for (int i = 0; i < m; ++i) {
        cplx y = F_quadrature(0.5 * (d - 3), cplx(zs[i], 0)) - F_singular(d, cplx(zs[i], 0));
        ys[i] = y.real();
        for (int r = 0; r < n; ++r) {
            rhs[r] += ys[i] * std::pow(zs[i], r);
            for (int c = 0; c < n; ++c) A[r][c] += std::pow(zs[i], r + c);
        }
    }
    // solve
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    PdExtract out;
    out.raw.resize(n);
    for (int i = 0; i < n; ++i) out.raw[i] = rhs[i] / A[i][i];
    auto snap = [](double c) {
        for (double scale : {1.0, M_PI}) {
            for (int q = 1; q <= 16; ++q) {
                double p = std::round(c / scale * q);
                if (std::abs(c - scale * p / q) < 1e-9 && std::abs(p) < 1e6) return scale * p / q;
            }
        }
        return c;
    };
    out.rounded = out.raw;
    for (auto& c : out.rounded) c = snap(c);
    double res = 0;
    for (int i = 0; i < m; ++i) {
        double fit = 0;
        for (int r = 0; r < n; ++r) fit += out.raw[r] * std::pow(zs[i], r);
        res = std::max(res, std::abs(fit - ys[i]));
    }
    out.residual = res;
    if (res > 1e-10) throw numeric_error("P_d_extract: fit residual above 1e-10");
    return out;
}

// recurrence residual max_zeta |F_{gamma+1} - (1-z^2) F_gamma - C_gamma z|
inline double recurrence_check(double gamma, const std::vector<cplx>& samples) {
    double cg = c_gamma(gamma);
    double worst = 0;
    for (cplx z : samples) {
        cplx lhs = F_quadrature(gamma + 1.0, z);
        cplx rhs = (1.0 - z * z) * F_quadrature(gamma, z) + cg * z;
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// ---- branch tracking along paths ----

namespace detail {

// walk a straight segment updating the unwrapped arguments of (t+1), (1-t)
inline void walk_args(cplx from, cplx to, double& arg_p, double& arg_m) {
    double mind = std::min(std::min(std::abs(from - 1.0), std::abs(from + 1.0)),
                           std::min(std::abs(to - 1.0), std::abs(to + 1.0)));
    int steps = std::max(1, int(std::ceil(std::abs(to - from) / (0.25 * std::max(mind, 1e-12)))));
    cplx prev = from;
    for (int s = 1; s <= steps; ++s) {
        cplx cur = from + (to - from) * (double(s) / steps);
        if (std::min(std::abs(cur - 1.0), std::abs(cur + 1.0)) < 1e-12)
            throw numeric_error("branch walk: path passes through a branch point");
        arg_p += std::arg((cur + 1.0) / (prev + 1.0));
        arg_m += std::arg((1.0 - cur) / (1.0 - prev));
        prev = cur;
    }
}

} // namespace detail

// path quadrature of (1-t^2)^gamma/(zeta-t) with the branch of (1-t^2)^gamma
// continued along the polyline from the real determination at the start
inline cplx F_contour(double gamma, cplx zeta, const std::vector<cplx>& path) {
    if (path.size() < 2 || std::abs(path.front() + 1.0) > 1e-12 || std::abs(path.back() - 1.0) > 1e-12)
        throw std::domain_error("F_contour: path must run from -1 to 1");
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        // distance from zeta to the segment
        cplx a = path[s], b = path[s + 1];
        cplx ab = b - a;
        double t = std::clamp(((zeta - a) / ab).real(), 0.0, 1.0);
        if (std::abs(zeta - (a + t * ab)) < 1e-6)
            throw numeric_error("F_contour: path too close to zeta");
    }
    cplx prev_result{};
    for (int n = 64; n <= 4096; n *= 2) {
        cplx total{};
        // unwrapped arguments of (t+1) and (1-t), initialised from the real
        // determination: at t=-1+, arg(1-t)=0 and arg(1+t)=arg of the first leg
        double arg_p = std::arg(path[1] + 1.0);
        double arg_m = 0.0;
        cplx walk_pos = path.front();
        auto value_at = [&](cplx t, double ap, double am) {
            // (1-t^2)^gamma = |1+t|^g |1-t|^g e^{i g (ap+am)}
            double mod = gamma * (std::log(std::abs(t + 1.0)) + std::log(std::abs(1.0 - t)));
            return std::exp(cplx(mod, gamma * (ap + am)));
        };
        for (std::size_t s = 0; s + 1 < path.size(); ++s) {
            cplx a = path[s], b = path[s + 1];
            bool first = (s == 0), last = (s + 2 == path.size());
            if (first || last) {
                // endpoint segment: Gauss-Jacobi absorbs the w^gamma factor;
                // the other factor's argument is tracked to the segment start
                int nn = std::max(n / 2, 32);
                const QuadRule& r = gauss_jacobi(nn, 0.0, gamma);
                if (first) {
                    // t = -1 + u (b+1), u = (1+x)/2
                    double lp = std::log(std::abs(b + 1.0));
                    for (int i = 0; i < nn; ++i) {
                        double u = 0.5 * (1.0 + r.x[i]);
                        cplx t = a + u * (b - a);
                        double am = arg_m;
                        double ap_loc = arg_p; // constant along the leg
                        // correct arg_m continuously from the walk position a
                        double am2 = am + std::arg((1.0 - t) / (1.0 - a));
                        double gmod = gamma * (lp + std::log(std::abs(1.0 - t)));
                        cplx w = std::exp(cplx(gmod, gamma * (ap_loc + am2)));
                        total += r.w[i] * std::pow(0.5, gamma + 1.0) * w / (zeta - t) * (b - a);
                    }
                } else {
                    // t = 1 - u (1-a), u = (1+x)/2 runs from the end t=1
                    double lm = std::log(std::abs(1.0 - a));
                    // arg of (1-t) along this leg equals arg of (1-a) tracked
                    for (int i = 0; i < nn; ++i) {
                        double u = 0.5 * (1.0 + r.x[i]);
                        cplx t = b + u * (a - b);
                        double ap2 = arg_p + std::arg((t + 1.0) / (a + 1.0));
                        double gmod = gamma * (lm + std::log(std::abs(t + 1.0)));
                        cplx w = std::exp(cplx(gmod, gamma * (ap2 + arg_m)));
                        total += r.w[i] * std::pow(0.5, gamma + 1.0) * w / (zeta - t) * (b - a);
                    }
                }
            } else {
                const QuadRule& r = gauss_legendre(n);
                for (int i = 0; i < n; ++i) {
                    cplx t = 0.5 * (a + b) + 0.5 * (b - a) * r.x[i];
                    double ap2 = arg_p + std::arg((t + 1.0) / (a + 1.0));
                    double am2 = arg_m + std::arg((1.0 - t) / (1.0 - a));
                    total += 0.5 * (b - a) * r.w[i] * value_at(t, ap2, am2) / (zeta - t);
                }
            }
            detail::walk_args(walk_pos, b, arg_p, arg_m);
            walk_pos = b;
        }
        if (n > 64 && std::abs(total - prev_result) <= 1e-11 * (1.0 + std::abs(total))) return total;
        prev_result = total;
    }
    return prev_result;
}

// Germ of F_{(d-3)/2} carried along paths with winding bookkeeping for the
// logarithm determinations at the two branch points ±1.
struct BranchContext {
    int d = 3;
    cplx base{};
    cplx current{};
    double arg_p = 0; // unwrapped arg of (zeta + 1)
    double arg_m = 0; // unwrapped arg of (zeta - 1)

    static BranchContext start(int d, cplx zeta0) {
        BranchContext c;
        c.d = d;
        c.base = zeta0;
        c.current = zeta0;
        c.arg_p = std::arg(zeta0 + 1.0);
        c.arg_m = std::arg(zeta0 - 1.0);
        return c;
    }

    int winding_plus() const { return int(std::lround((arg_m - std::arg(current - 1.0)) / (2 * M_PI))); }
    int winding_minus() const { return int(std::lround((arg_p - std::arg(current + 1.0)) / (2 * M_PI))); }

    cplx log_plus() const { return cplx(std::log(std::abs(current + 1.0)), arg_p); }
    cplx log_minus() const { return cplx(std::log(std::abs(current - 1.0)), arg_m); }

    cplx value() const {
        int k2 = d - 3;
        if (d % 2 == 1) {
            cplx pw = std::pow(1.0 - current * current, double(k2) / 2.0);
            return pw * (log_plus() - log_minus()) + eval_poly(P_d_coefficients(d), current);
        }
        double sgn = ((d - 2) / 2) % 2 == 0 ? 1.0 : -1.0;
        cplx pw = std::exp(0.5 * double(k2) * (log_plus() + log_minus()));
        return sgn * M_PI * pw + eval_poly(P_d_coefficients(d), current);
    }
};

// analytic continuation of the F germ along a piecewise-linear path
inline BranchContext continue_along_path(BranchContext ctx, const std::vector<cplx>& path) {
    if (path.empty()) return ctx;
    if (std::abs(path.front() - ctx.current) > 1e-12)
        throw std::domain_error("continue_along_path: path must start at the current point");
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        // arg of (t-1) tracks like -(arg of (1-t)); reuse the walker on (t+1),(1-t)
        double am_flip = ctx.arg_m + M_PI; // arg(1-t) = arg(-(t-1)) = arg(t-1) + pi
        detail::walk_args(path[s], path[s + 1], ctx.arg_p, am_flip);
        ctx.arg_m = am_flip - M_PI;
    }
    ctx.current = path.back();
    return ctx;
}

// convenience: a closed counterclockwise circle around a point, as a polyline
inline std::vector<cplx> loop_around(cplx center, double radius, cplx start, int segments = 64,
                                     int turns = 1) {
    std::vector<cplx> path;
    double a0 = std::arg(start - center);
    double r = std::abs(start - center);
    (void)radius;
    for (int i = 0; i <= segments * std::abs(turns); ++i) {
        double a = a0 + 2.0 * M_PI * turns * double(i) / (segments * std::abs(turns));
        path.push_back(center + r * std::exp(cplx(0, a)));
    }
    return path;
}

} // namespace branch
} // namespace poincare
