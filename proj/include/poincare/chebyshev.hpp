#pragma once

// Chebyshev interpolation on an interval with complex coefficients, Clenshaw
// evaluation at complex arguments, series differentiation, and Bernstein
// ellipse bookkeeping for certified analytic continuation.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace poincare {

using cplx = std::complex<double>;

struct ChebSeries {
    double a = -1.0, b = 1.0; // interval
    std::vector<cplx> coef;   // plain coefficients of sum c_k T_k(map(x))
    double fit_tail = 0.0;    // pre-trim trailing magnitude (fit convergence)

    cplx map(cplx x) const { return (2.0 * x - (a + b)) / (b - a); }

    cplx eval(cplx x) const {
        const cplx t = map(x);
        cplx b1{}, b2{};
        for (int k = int(coef.size()) - 1; k >= 1; --k) {
            cplx tmp = 2.0 * t * b1 - b2 + coef[k];
            b2 = b1;
            b1 = tmp;
        }
        return t * b1 - b2 + (coef.empty() ? cplx{} : coef[0]);
    }
    double eval_real(double x) const { return eval(cplx(x, 0)).real(); }

    ChebSeries derivative() const {
        const int n = int(coef.size());
        ChebSeries d;
        d.a = a;
        d.b = b;
        d.coef.assign(std::max(n - 1, 1), cplx{});
        if (n >= 2) {
            std::vector<cplx> dp(n + 2, cplx{});
            for (int k = n - 2; k >= 0; --k) dp[k] = dp[k + 2] + 2.0 * double(k + 1) * coef[k + 1];
            dp[0] *= 0.5;
            const double scale = 2.0 / (b - a);
            for (int k = 0; k < n - 1; ++k) d.coef[k] = dp[k] * scale;
        }
        return d;
    }

    double max_coef() const {
        double m = 0;
        for (auto& c : coef) m = std::max(m, std::abs(c));
        return m;
    }

    // magnitude of the trailing coefficients (truncation indicator)
    double tail_estimate() const {
        const int n = int(coef.size());
        double t = 0.0;
        for (int k = std::max(0, n - 4); k < n; ++k) t = std::max(t, std::abs(coef[k]));
        return t;
    }

    // Bernstein ellipse parameter rho >= 1 of a point relative to [a,b]
    double ellipse_param(cplx z) const {
        cplx w = map(z);
        cplx r = std::sqrt(w * w - 1.0);
        return std::max(std::abs(w + r), std::abs(w - r));
    }

    // Error bound of evaluating the series at ellipse parameter rho:
    // extrapolated truncation tail plus noise-floor amplification.
    double continuation_error(double rho) const {
        const int n = int(coef.size());
        if (n < 8) return 1e300;
        const double mc = max_coef();
        if (mc == 0.0) return 0.0;
        // genuine decay range: down to the rounding floor only
        const double floor = 3e-14 * mc;
        int k_end = n - 1;
        while (k_end > 4 && std::abs(coef[k_end]) < floor) --k_end;
        if (k_end <= 6) {
            // effectively a short polynomial: only the noise floor amplifies
            return floor * (std::pow(rho, double(n)) - 1.0) / std::max(rho - 1.0, 1e-12);
        }
        int k0 = std::max(2, k_end / 3);
        if (k_end - k0 < 4) return 1e300;
        double kbar = 0, lbar = 0, cnt = 0;
        for (int k = k0; k <= k_end; ++k) {
            kbar += k;
            lbar += std::log(std::max(std::abs(coef[k]), 1e-300));
            cnt += 1;
        }
        kbar /= cnt;
        lbar /= cnt;
        double sxx = 0, sxy = 0;
        for (int k = k0; k <= k_end; ++k) {
            double lm = std::log(std::max(std::abs(coef[k]), 1e-300));
            sxy += (k - kbar) * (lm - lbar);
            sxx += (k - kbar) * (k - kbar);
        }
        const double slope = sxy / sxx;
        if (slope >= -1e-3) return 1e300; // no decay: not certifiable
        const double r_decay = std::exp(-slope);
        if (rho >= 0.98 * r_decay) return 1e300;
        const double cn = std::max(std::abs(coef[k_end]), floor);
        const double q = rho / r_decay;
        const double trunc = cn * std::pow(rho, double(k_end)) * q / (1.0 - q);
        const double noise = floor * (std::pow(rho, double(n)) - 1.0) / std::max(rho - 1.0, 1e-12);
        return trunc + noise;
    }

    // largest rho <= cap with continuation error below tol
    double certified_rho(double tol, double cap = 1.5) const {
        if (continuation_error(1.0 + 1e-9) > tol) return 1.0;
        double lo = 1.0, hi = cap;
        if (continuation_error(cap) <= tol) return cap;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (continuation_error(mid) <= tol ? lo : hi) = mid;
        }
        return lo;
    }
};

// Interpolate f on [a,b] at n Chebyshev points of the first kind.  O(n^2)
// cosine transform; node counts stay modest throughout.
template <typename F>
ChebSeries cheb_fit(F&& f, double a, double b, int n) {
    std::vector<cplx> fv(n);
    for (int j = 0; j < n; ++j) {
        double t = std::cos(M_PI * (j + 0.5) / n);
        double x = 0.5 * (a + b) + 0.5 * (b - a) * t;
        fv[j] = cplx(f(x));
    }
    ChebSeries s;
    s.a = a;
    s.b = b;
    s.coef.assign(n, cplx{});
    for (int k = 0; k < n; ++k) {
        cplx acc{};
        for (int j = 0; j < n; ++j) acc += fv[j] * std::cos(M_PI * k * (j + 0.5) / n);
        s.coef[k] = acc * (2.0 / n);
    }
    s.coef[0] *= 0.5;
    for (int k = std::max(0, n - 4); k < n; ++k) s.fit_tail = std::max(s.fit_tail, std::abs(s.coef[k]));
    // trim trailing coefficients at the rounding floor: keeping them would only
    // amplify noise under continuation off the interval
    double mc = s.max_coef();
    int keep = int(s.coef.size());
    while (keep > 8 && std::abs(s.coef[keep - 1]) < 1e-14 * mc && std::abs(s.coef[keep - 2]) < 1e-14 * mc)
        --keep;
    s.coef.resize(keep);
    return s;
}

} // namespace poincare
