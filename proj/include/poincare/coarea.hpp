#pragma once

// Level-set densities J(tau, f, G) of Morse functions with two critical
// points, their piecewise-Chebyshev models with certified Bernstein-ellipse
// continuation, Cauchy transforms with endpoint-adapted quadrature, Plemelj
// jumps, second-sheet continuation across the cut, contour-deformed
// cross-evaluation, and near-critical exponent fits.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "poincare/chebyshev.hpp"
#include "poincare/quadrature.hpp"
#include "poincare/sphere_function.hpp"

namespace poincare {
namespace coarea {

// Frozen orientation of the second-sheet correction: crossing the cut upward
// (continuation from Im z < 0) adds +2*pi*i times the continued density.
// Calibrated once against contour-deformed quadrature and kept fixed.
inline constexpr double kSecondSheetSign = +1.0;

namespace detail {

// panel breakpoints on [lo,hi], graded towards p in [lo,hi] with innermost size ~ dd
inline std::vector<double> graded_panels(double lo, double hi, double p, double dd) {
    p = std::clamp(p, lo, hi);
    std::vector<double> cuts = {lo, hi};
    if (p > lo && p < hi) cuts.push_back(p);
    for (double w = std::max(dd, 1e-14); p - w > lo || p + w < hi; w *= 2.0) {
        if (p - w > lo) cuts.push_back(p - w);
        if (p + w < hi) cuts.push_back(p + w);
        if (w > (hi - lo)) break;
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

template <typename F>
cplx integrate_graded(F&& f, double lo, double hi, double p, double dd, int n_per_panel = 20) {
    auto cuts = graded_panels(lo, hi, p, dd);
    cplx s{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        s += integrate_gl(f, cuts[i], cuts[i + 1], n_per_panel);
    return s;
}

} // namespace detail

// ---- the density itself ----

// two real roots of f = tau on S^1, (increasing-branch root, decreasing-branch root)
inline std::array<double, 2> level_roots_s1(const SphereFunction& f, double tau) {
    if (!(tau > f.min_value() && tau < f.max_value()))
        throw std::domain_error("level_roots_s1: tau outside (min f, max f)");
    double pmax = f.phi_max();
    double pmin = f.phi_min();
    if (pmin < pmax) pmin += 2.0 * M_PI;
    auto refine = [&](double lo, double hi, bool increasing) {
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            double v = f.eval1(mid)[0] - tau;
            if ((v > 0) == increasing)
                hi = mid;
            else
                lo = mid;
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 12; ++it) {
            auto e = f.eval1(x);
            double step = (e[0] - tau) / e[1];
            if (!std::isfinite(step)) break;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        auto e = f.eval1(x);
        if (std::abs(e[0] - tau) > 1e-10 * (1.0 + std::abs(tau)))
            throw numeric_error("level_roots_s1: root refinement failed");
        return x;
    };
    double dec = refine(pmax, pmin, false);           // f decreasing: max -> min
    double inc = refine(pmin, pmax + 2.0 * M_PI, true); // f increasing: min -> max
    return {inc, dec};
}

// J(tau, f, G): d=2 root sum, d=3 level-curve line integral of G/|grad f|
inline cplx density(const SphereFunction& f, const G1& g, double tau) {
    auto r = level_roots_s1(f, tau);
    auto ei = f.eval1(r[0]), ed = f.eval1(r[1]);
    return g(cplx(r[0])) / ei[1] - g(cplx(r[1])) / ed[1];
}

inline cplx density(const SphereFunction& f, const G2& g, double tau) {
    if (f.sphere_dim() != 2) throw std::domain_error("density: S^2 integrand on S^1 function");
    if (!(tau > f.min_value() && tau < f.max_value()))
        throw std::domain_error("density: tau outside (min f, max f)");
    // exact level-circle parametrization; spectrally convergent trapezoid
    int n = 64;
    cplx prev{};
    for (;;) {
        cplx s{};
        for (int i = 0; i < n; ++i) {
            double alpha = 2.0 * M_PI * i / n;
            auto th = f.level_point(tau, alpha);
            double gn = geom::norm(f.grad2(th));
            if (gn < 1e-14) throw numeric_error("density: vanishing gradient on the level curve");
            s += g(th) * (f.level_speed(tau, alpha) / gn);
        }
        s *= 2.0 * M_PI / n;
        if (n > 64 && std::abs(s - prev) <= 1e-13 * (1.0 + std::abs(s))) return s;
        prev = s;
        n *= 2;
        if (n > 16384) throw numeric_error("density: level-curve quadrature did not converge");
    }
}

// generic predictor-corrector marching on S^2 (contract path; the exact
// parametrization above serves as its spectral refinement and cross-check)
inline cplx density_marching(const SphereFunction& f, const G2& g, double tau, double step = 1e-2,
                             double tol = 1e-10) {
    if (f.sphere_dim() != 2) throw std::domain_error("density_marching: S^2 only");
    // seed on a meridian scan from the minimum to the maximum axis
    Vec seed = f.level_point(tau, 0.0); // meridian alpha = 0
    auto correct = [&](Vec p) {
        for (int it = 0; it < 60; ++it) {
            double v = f.eval2(p) - tau;
            if (std::abs(v) < tol) break;
            Vec gr = f.grad2(p);
            double g2 = geom::dot(gr, gr);
            if (g2 < 1e-20) throw numeric_error("density_marching: corrector hit a critical point");
            for (int i = 0; i < 3; ++i) p[i] -= v * gr[i] / g2;
            double n = geom::norm(p);
            for (auto& c : p) c /= n;
        }
        return p;
    };
    Vec p = correct(seed);
    cplx acc{};
    double total_len = 0;
    Vec start = p;
    int guard = 0;
    while (true) {
        Vec gr = f.grad2(p);
        double gn = geom::norm(gr);
        Vec t = {p[1] * gr[2] - p[2] * gr[1], p[2] * gr[0] - p[0] * gr[2], p[0] * gr[1] - p[1] * gr[0]};
        double tn = geom::norm(t);
        for (auto& c : t) c /= tn;
        Vec q(3);
        for (int i = 0; i < 3; ++i) q[i] = p[i] + step * t[i];
        double qn = geom::norm(q);
        for (auto& c : q) c /= qn;
        q = correct(q);
        double dl = 0;
        for (int i = 0; i < 3; ++i) dl += (q[i] - p[i]) * (q[i] - p[i]);
        dl = std::sqrt(dl);
        double gq = geom::norm(f.grad2(q));
        acc += 0.5 * (g(p) / gn + g(q) / gq) * dl;
        total_len += dl;
        p = q;
        ++guard;
        double dstart = 0;
        for (int i = 0; i < 3; ++i) dstart += (p[i] - start[i]) * (p[i] - start[i]);
        if (guard > 8 && std::sqrt(dstart) < step) {
            // closing segment back to the seed
            double cl = std::sqrt(dstart);
            acc += 0.5 * (g(p) / geom::norm(f.grad2(p)) + g(start) / geom::norm(f.grad2(start))) * cl;
            break;
        }
        if (guard > 2000000) throw numeric_error("density_marching: curve did not close");
    }
    return acc;
}

// ---- fitted model ----

struct EndpointRecord {
    double critical_value = 0;
    double exponent = 0;      // fitted slope of ln J vs ln(u - crit)
    double prefactor = 0;     // extrapolated A(0)
    double fit_residual = 0;
};

struct CriticalExponentFit {
    double exponent = 0;
    double prefactor = 0;
    double residual = 0;
};

// least-squares slope of ln|J| against ln(u-crit) on log-spaced samples
template <typename GT>
CriticalExponentFit critical_exponent(const SphereFunction& f, const GT& g, bool at_min,
                                      double lo = 1e-6, double hi = 1e-2, int npts = 25) {
    CriticalExponentFit out;
    std::vector<double> xs, ys;
    double maxJ = 0;
    std::vector<double> us, Js;
    for (int i = 0; i < npts; ++i) {
        double u = lo * std::pow(hi / lo, double(i) / (npts - 1));
        double tau = at_min ? f.min_value() + u : f.max_value() - u;
        double J = std::abs(density(f, g, tau));
        us.push_back(u);
        Js.push_back(J);
        maxJ = std::max(maxJ, J);
    }
    if (maxJ < 1e-250) return out; // identically vanishing integrand
    for (int i = 0; i < npts; ++i) {
        if (Js[i] <= 0) throw numeric_error("critical_exponent: vanishing density sample");
        xs.push_back(std::log(us[i]));
        ys.push_back(std::log(Js[i]));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    out.exponent = sxy / sxx;
    double ic = my - out.exponent * mx;
    double res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        res = std::max(res, std::abs(ys[i] - (out.exponent * xs[i] + ic)));
    out.residual = res;
    if (res > 0.3) throw numeric_error("critical_exponent: poor power-law fit (non-Morse input?)");
    // prefactor A(0): deflate by the exponent (snapped to the nearest half-integer,
    // the only values the local model produces) and extrapolate linearly in u
    double gamma = std::round(2.0 * out.exponent) / 2.0;
    if (std::abs(gamma - out.exponent) > 0.05) gamma = out.exponent;
    double su = 0, su2 = 0, sa = 0, sua = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double u = std::exp(xs[i]);
        double av = std::exp(ys[i] - gamma * xs[i]);
        su += u;
        su2 += u * u;
        sa += av;
        sua += u * av;
    }
    double n = double(xs.size());
    double slope_u = (n * sua - su * sa) / (n * su2 - su * su);
    out.prefactor = (sa - slope_u * su) / n;
    return out;
}

// Piecewise-Chebyshev model of J on [min f, max f]: deflated smooth factors on
// the two endpoint subintervals (weight (tau-a)^gamma), adaptive interior
// partition with half-width <= 1/4 distance to the critical values.
class LevelDensity {
  public:
    int ambient_dim = 2;
    double gamma = -0.5; // (d-3)/2
    double a = 0, b = 0, delta = 0;
    std::vector<ChebSeries> pieces;              // interior J models (fitted on extended intervals)
    std::vector<std::array<double, 2>> core;     // disjoint partition owned by each piece
    std::vector<double> rho_cert;                // certified ellipse parameter per piece
    ChebSeries end_lo, end_hi;                   // deflated factors H with J = w^gamma H
    EndpointRecord rec_lo, rec_hi;
    double tail_max = 0;

    // evaluation sources for path-mode continuation (d = 2)
    std::optional<SphereFunction> f;
    G1 g1;

    cplx eval_real(double tau) const {
        if (!(tau > a && tau < b)) throw std::domain_error("LevelDensity: tau outside (min f, max f)");
        if (tau <= a + delta) return std::pow(tau - a, gamma) * end_lo.eval(cplx(tau));
        if (tau >= b - delta) return std::pow(b - tau, gamma) * end_hi.eval(cplx(tau));
        for (std::size_t i = 0; i < pieces.size(); ++i)
            if (tau >= core[i][0] - 1e-14 && tau <= core[i][1] + 1e-14) return pieces[i].eval(cplx(tau));
        throw numeric_error("LevelDensity: no covering piece");
    }

    // index of an interior piece whose certified ellipse contains z, or -1
    int covering_piece(cplx z) const {
        for (std::size_t i = 0; i < pieces.size(); ++i)
            if (pieces[i].ellipse_param(z) <= rho_cert[i]) return int(i);
        return -1;
    }

    bool has_path_mode() const { return f.has_value() && f->sphere_dim() == 1 && bool(g1); }

    // continued density at complex z: certified ellipse evaluation, with d = 2
    // root-tracking fallback; never extrapolates silently
    cplx continue_at(cplx z) const {
        int i = covering_piece(z);
        if (i >= 0) return pieces[i].eval(z);
        if (has_path_mode()) return tracked(z, 0);
        throw numeric_error("LevelDensity: z outside every certified ellipse");
    }

    // ell-th derivative of the continued density at z
    cplx continue_deriv(cplx z, int ell) const {
        int i = covering_piece(z);
        if (i >= 0) {
            ChebSeries s = pieces[i];
            for (int k = 0; k < ell; ++k) s = s.derivative();
            return s.eval(z);
        }
        if (has_path_mode()) return tracked(z, ell);
        throw numeric_error("LevelDensity: z outside every certified ellipse");
    }

    // d = 2 second method: Newton tracking of the complex roots of f = z
    cplx tracked(cplx z, int ell) const {
        if (!has_path_mode()) throw numeric_error("LevelDensity: path mode unavailable");
        if (ell == 0) return tracked_value(z);
        // Cauchy derivative on a small circle around z
        double r = 0.25 * std::min(std::abs(z - a), std::abs(b - z));
        if (r <= 0) throw numeric_error("LevelDensity: derivative circle touches a critical value");
        const int n = 32;
        cplx s{};
        for (int k = 0; k < n; ++k) {
            double t = 2.0 * M_PI * k / n;
            cplx w = z + r * std::exp(cplx(0, t));
            s += tracked_value(w) * std::exp(cplx(0, -double(ell) * t));
        }
        double fact = 1;
        for (int k = 2; k <= ell; ++k) fact *= k;
        return s * fact / (double(n) * std::pow(r, ell));
    }

    cplx tracked_value(cplx z) const {
        const SphereFunction& fn = *f;
        double margin = 0.05 * (b - a);
        double tau0 = std::clamp(z.real(), a + margin, b - margin);
        auto roots = level_roots_s1(fn, tau0);
        cplx th_inc(roots[0]), th_dec(roots[1]);
        cplx target(z), from(tau0);
        double mind = std::min(std::abs(z - a), std::abs(b - z));
        mind = std::min(mind, std::min(tau0 - a, b - tau0));
        int nsteps = std::max(1, int(std::ceil(std::abs(target - from) / (0.25 * mind))));
        for (int s = 1; s <= nsteps; ++s) {
            cplx w = from + (target - from) * (double(s) / nsteps);
            for (cplx* th : {&th_inc, &th_dec}) {
                cplx x = *th;
                bool ok = false;
                for (int it = 0; it < 50; ++it) {
                    auto e = fn.eval1_c(x);
                    cplx r = e[0] - w;
                    if (std::abs(r) < 1e-13 * (1.0 + std::abs(w))) {
                        ok = true;
                        break;
                    }
                    if (std::abs(e[1]) < 1e-14) break;
                    x -= r / e[1];
                }
                if (!ok) {
                    auto e = fn.eval1_c(x);
                    if (std::abs(e[0] - w) > 1e-9 * (1.0 + std::abs(w)))
                        throw numeric_error("LevelDensity: complex root tracking failed");
                }
                *th = x;
            }
        }
        auto ei = fn.eval1_c(th_inc), ed = fn.eval1_c(th_dec);
        return g1(th_inc) / ei[1] - g1(th_dec) / ed[1];
    }
};

template <typename GT>
LevelDensity density_fit(const SphereFunction& f, const GT& g, double delta, int degree = 48) {
    const double a = f.min_value(), b = f.max_value();
    if (!(delta > 0 && delta < 0.25 * (b - a)))
        throw std::domain_error("density_fit: need 0 < delta < (max f - min f)/4");
    LevelDensity ld;
    ld.ambient_dim = f.ambient_dim();
    ld.gamma = f.density_exponent();
    ld.a = a;
    ld.b = b;
    ld.delta = delta;
    auto J = [&](double tau) { return density(f, g, tau); };
    // deflated endpoint factors H = J * w^{-gamma}
    ld.end_lo = cheb_fit([&](double tau) { return J(tau) * std::pow(tau - a, -ld.gamma); }, a,
                         a + delta, degree);
    ld.end_hi = cheb_fit([&](double tau) { return J(tau) * std::pow(b - tau, -ld.gamma); }, b - delta,
                         b, degree);
    // adaptive interior partition obeying the quarter rule
    std::vector<std::pair<double, double>> stack = {{a + delta, b - delta}}, done;
    while (!stack.empty()) {
        auto [lo, hi] = stack.back();
        stack.pop_back();
        double half = 0.5 * (hi - lo);
        double edge = std::min(lo - a, b - hi);
        if (half <= 0.25 * edge || half < 1e-6 * (b - a)) {
            done.push_back({lo, hi});
        } else {
            double mid = 0.5 * (lo + hi);
            stack.push_back({mid, hi});
            stack.push_back({lo, mid});
        }
    }
    std::sort(done.begin(), done.end());
    // Each piece owns a disjoint core but is fitted on an extended interval:
    // Bernstein ellipses pinch at interval endpoints, and un-extended pieces
    // would leave continuation gaps right above the junctions.
    const double ext = 0.30;
    double scale = 1.0;
    std::vector<std::pair<double, double>> work(done.rbegin(), done.rend());
    int refinements = 0;
    while (!work.empty()) {
        auto [lo, hi] = work.back();
        work.pop_back();
        double w = hi - lo;
        double flo = std::max(a + delta, lo - ext * w), fhi = std::min(b - delta, hi + ext * w);
        ChebSeries p = cheb_fit(J, flo, fhi, degree);
        scale = std::max(scale, p.max_coef());
        if (p.fit_tail > 1e-12 * std::max(1.0, scale)) {
            // a nearby complex singularity of J shortens the analyticity radius
            if (++refinements > 200 || w < 1e-5 * (b - a))
                throw numeric_error("density_fit: non-decaying Chebyshev tail (raise degree or check input)");
            double mid = 0.5 * (lo + hi);
            work.push_back({mid, hi});
            work.push_back({lo, mid});
            continue;
        }
        ld.pieces.push_back(std::move(p));
        ld.core.push_back({lo, hi});
    }
    // restore ascending order of cores after the refinement stack
    std::vector<std::size_t> order(ld.pieces.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return ld.core[x][0] < ld.core[y][0]; });
    std::vector<ChebSeries> ps;
    std::vector<std::array<double, 2>> cs;
    for (auto i : order) {
        ps.push_back(std::move(ld.pieces[i]));
        cs.push_back(ld.core[i]);
    }
    ld.pieces = std::move(ps);
    ld.core = std::move(cs);
    for (auto& p : ld.pieces) {
        ld.tail_max = std::max(ld.tail_max, p.fit_tail);
        ld.rho_cert.push_back(p.certified_rho(1e-9));
    }
    auto rl = critical_exponent(f, g, true);
    auto rh = critical_exponent(f, g, false);
    ld.rec_lo = {a, rl.exponent, rl.prefactor, rl.residual};
    ld.rec_hi = {b, rh.exponent, rh.prefactor, rh.residual};
    if constexpr (std::is_same_v<std::decay_t<GT>, G1>) {
        ld.f = f;
        ld.g1 = g;
    } else {
        ld.f = f;
    }
    return ld;
}

// ---- Cauchy transforms ----

inline double segment_distance(cplx z, double a, double b) {
    double x = std::clamp(z.real(), a, b);
    return std::abs(z - cplx(x, 0.0));
}

// CT_ell(z) = (-1)^ell ell! \int_a^b J(tau)/(z-tau)^{ell+1} dtau
inline cplx cauchy_transform(const LevelDensity& ld, cplx z, int ell = 0) {
    if (segment_distance(z, ld.a, ld.b) < 1e-10)
        throw numeric_error("cauchy_transform: z too close to the spectrum segment");
    double fact = 1;
    for (int k = 2; k <= ell; ++k) fact *= k;
    double sign = (ell % 2 == 0) ? 1.0 : -1.0;
    cplx total{};
    // endpoint subintervals via tau = end ± u^2 (deflated integrand is smooth)
    {
        double su = std::sqrt(ld.delta);
        auto f_lo = [&](double u) {
            double tau = ld.a + u * u;
            cplx H = ld.end_lo.eval(cplx(tau));
            return 2.0 * std::pow(u, 2.0 * ld.gamma + 1.0) * H / std::pow(z - tau, double(ell + 1));
        };
        cplx zu = std::sqrt(z - ld.a); // pole location in the u variable
        double pproj = std::clamp(zu.real(), 0.0, su);
        double dd = std::max(1e-13, std::abs(zu - cplx(pproj, 0)));
        total += detail::integrate_graded(f_lo, 0.0, su, pproj, 0.5 * dd);
        auto f_hi = [&](double u) {
            double tau = ld.b - u * u;
            cplx H = ld.end_hi.eval(cplx(tau));
            return 2.0 * std::pow(u, 2.0 * ld.gamma + 1.0) * H / std::pow(z - tau, double(ell + 1));
        };
        cplx zv = std::sqrt(ld.b - z);
        // for f_hi the natural variable reverses orientation twice: net sign +
        double pproj2 = std::clamp(zv.real(), 0.0, su);
        double dd2 = std::max(1e-13, std::abs(zv - cplx(pproj2, 0)));
        total += detail::integrate_graded(f_hi, 0.0, su, pproj2, 0.5 * dd2);
    }
    for (std::size_t i = 0; i < ld.pieces.size(); ++i) {
        const auto& p = ld.pieces[i];
        const double clo = ld.core[i][0], chi = ld.core[i][1];
        auto f = [&](double tau) { return p.eval(cplx(tau)) / std::pow(z - tau, double(ell + 1)); };
        double pr = std::clamp(z.real(), clo, chi);
        double dd = std::max(1e-13, std::abs(z - cplx(pr, 0)));
        if (dd > 2.0 * (chi - clo))
            total += integrate_gl(f, clo, chi, 32);
        else
            total += detail::integrate_graded(f, clo, chi, pr, 0.5 * dd);
    }
    return sign * fact * total;
}

// ---- direct sphere-side integrals ----

// plain: (-1)^ell ell! \int G/(z - f)^{ell+1} dVol (matches cauchy_transform);
// rotated: \int G/(z - i f)^{ell+1} dVol (the resolvent-side form)
template <typename GT>
cplx direct_integral(const SphereFunction& f, const GT& g, cplx z, int ell = 0, bool rotated = false) {
    double dist = rotated ? segment_distance(z / cplx(0, 1), f.min_value(), f.max_value())
                          : segment_distance(z, f.min_value(), f.max_value());
    if (dist < 1e-10) throw numeric_error("direct_integral: z too close to the spectrum segment");
    double fact = 1;
    for (int k = 2; k <= ell; ++k) fact *= k;
    double sign = (ell % 2 == 0) ? 1.0 : -1.0;
    cplx front = rotated ? cplx(1.0) : cplx(sign * fact);
    if constexpr (std::is_same_v<std::decay_t<GT>, G1>) {
        if (f.sphere_dim() != 1) throw std::domain_error("direct_integral: dimension mismatch");
        auto integrand = [&](double phi) {
            cplx fv(f.eval1(phi)[0]);
            cplx den = rotated ? (z - cplx(0, 1) * fv) : (z - fv);
            return g(cplx(phi)) / std::pow(den, double(ell + 1));
        };
        int n = 128;
        cplx prev{};
        for (;;) {
            cplx s = integrate_periodic(integrand, n);
            if (n > 128 && std::abs(s - prev) <= 1e-12 * (1.0 + std::abs(s))) return front * s;
            prev = s;
            n *= 2;
            if (n > 65536) throw numeric_error("direct_integral: quadrature did not converge");
        }
    } else {
        if (f.sphere_dim() != 2) throw std::domain_error("direct_integral: dimension mismatch");
        int npol = 32;
        cplx prev{};
        for (;;) {
            const QuadRule& gl = gauss_legendre(npol);
            int naz = 2 * npol;
            cplx s{};
            for (int i = 0; i < npol; ++i) {
                double pol = std::acos(gl.x[i]);
                cplx row{};
                for (int j = 0; j < naz; ++j) {
                    double az = 2.0 * M_PI * j / naz;
                    Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
                    cplx fv(f.eval2(th));
                    cplx den = rotated ? (z - cplx(0, 1) * fv) : (z - fv);
                    row += g(th) / std::pow(den, double(ell + 1));
                }
                s += gl.w[i] * row * (2.0 * M_PI / naz);
            }
            if (npol > 32 && std::abs(s - prev) <= 1e-11 * (1.0 + std::abs(s))) return front * s;
            prev = s;
            npol *= 2;
            if (npol > 512) throw numeric_error("direct_integral: quadrature did not converge");
        }
    }
}

// ---- Plemelj jump ----

// Richardson-extrapolated limit of CT(tau + i eps) - CT(tau - i eps);
// contract: equals -2 pi i J(tau)
inline cplx plemelj_jump(const LevelDensity& ld, double tau, double eps0 = 1e-2, int levels = 6) {
    if (!(tau > ld.a + ld.delta && tau < ld.b - ld.delta))
        throw std::domain_error("plemelj_jump: tau must be interior, away from critical values");
    std::vector<cplx> vals;
    for (int k = 0; k < levels; ++k) {
        double eps = eps0 / double(1 << k);
        vals.push_back(cauchy_transform(ld, cplx(tau, eps)) - cauchy_transform(ld, cplx(tau, -eps)));
    }
    // jump(eps) = J0 + c1 eps + c2 eps^2 + ...: Richardson eliminating every power
    std::vector<cplx> row = vals;
    for (int lev = 1; lev < levels; ++lev) {
        double fac = std::pow(2.0, lev);
        for (int i = levels - 1; i >= lev; --i) row[i] = (fac * row[i] - row[i - 1]) / (fac - 1.0);
    }
    if (levels >= 3 && std::abs(row[levels - 1] - row[levels - 2]) >
                           1e-3 * (1.0 + std::abs(row[levels - 1])))
        throw numeric_error("plemelj_jump: extrapolation did not converge");
    return row[levels - 1];
}

// ---- second sheet ----

// Cauchy transform continued across the cut: from Im z < 0 upward (default),
// the sheet-1 value plus kSecondSheetSign * 2 pi i * J_cont^{(ell)}(z).
inline cplx second_sheet(const LevelDensity& ld, cplx z, int ell = 0, bool from_below = true) {
    cplx corr = ld.continue_deriv(z, ell);
    double sgn = from_below ? kSecondSheetSign : -kSecondSheetSign;
    return cauchy_transform(ld, z, ell) + sgn * cplx(0, 2.0 * M_PI) * corr;
}

// Independent cross-method: CT_ell continued from below, computed by pushing
// the tau-contour to the other side of z (d = 2 path-mode density only).
inline cplx cauchy_continued_contour(const LevelDensity& ld, cplx z, int ell = 0,
                                     double depth_factor = 1.5) {
    if (!ld.has_path_mode()) throw numeric_error("cauchy_continued_contour: path mode unavailable");
    double fact = 1;
    for (int k = 2; k <= ell; ++k) fact *= k;
    double sign = (ell % 2 == 0) ? 1.0 : -1.0;
    const double a = ld.a, b = ld.b;
    const double span = b - a;
    double depth = std::max(0.05 * span, depth_factor * std::max(0.0, z.imag()));
    // the dip must bracket Re z so that a crossed pole ends up enclosed
    double xL = std::clamp(z.real() - 0.15 * span, a + 0.05 * span, b - 0.30 * span);
    double xR = std::clamp(z.real() + 0.15 * span, xL + 0.10 * span, b - 0.05 * span);
    double w = xL - a, wb = b - xR;
    // real end pieces [a, a+w], [b-wb, b] via the deflated endpoint models
    cplx total{};
    auto add_end = [&](bool low, double width) {
        double su = std::sqrt(std::min(width, ld.delta));
        auto fend = [&](double u) {
            double tau = low ? a + u * u : b - u * u;
            cplx H = low ? ld.end_lo.eval(cplx(tau)) : ld.end_hi.eval(cplx(tau));
            return 2.0 * std::pow(u, 2.0 * ld.gamma + 1.0) * H / std::pow(z - tau, double(ell + 1));
        };
        total += integrate_gl(fend, 0.0, su, 48);
        return low ? a + su * su : b - su * su;
    };
    double left_end = add_end(true, w);
    double right_end = add_end(false, wb);
    // if the endpoint models do not reach the requested width, cover the rest on the axis
    auto J_on_axis = [&](double tau) { return ld.eval_real(tau); };
    if (left_end < a + w)
        total += integrate_gl(
            [&](double tau) { return J_on_axis(tau) / std::pow(z - tau, double(ell + 1)); }, left_end,
            a + w, 48);
    if (right_end > b - wb)
        total += integrate_gl(
            [&](double tau) { return J_on_axis(tau) / std::pow(z - tau, double(ell + 1)); }, b - wb,
            right_end, 48);
    // complex dip above z: a+w -> a+w+i depth -> b-wb+i depth -> b-wb
    std::vector<cplx> verts = {cplx(a + w, 0), cplx(a + w, depth), cplx(b - wb, depth), cplx(b - wb, 0)};
    for (std::size_t s = 0; s + 1 < verts.size(); ++s) {
        cplx z0 = verts[s], z1 = verts[s + 1];
        double len = std::abs(z1 - z0);
        int panels = std::max(1, int(std::ceil(len / 0.1)));
        double dmin = 1e300;
        dmin = std::min(dmin, std::abs(z - z0));
        dmin = std::min(dmin, std::abs(z - z1));
        for (int pq = 0; pq < panels; ++pq) {
            cplx pa = z0 + (z1 - z0) * (double(pq) / panels);
            cplx pb = z0 + (z1 - z0) * (double(pq + 1) / panels);
            auto fseg = [&](double tt) {
                cplx tau = pa + (pb - pa) * tt;
                return ld.tracked(tau, 0) / std::pow(z - tau, double(ell + 1)) * (pb - pa);
            };
            int nq = (std::abs(0.5 * (pa + pb) - z) < 0.2) ? 64 : 32;
            total += integrate_gl(fseg, 0.0, 1.0, nq);
        }
    }
    return sign * fact * total;
}

} // namespace coarea
} // namespace poincare
