#pragma once

// Truncated Taylor ("jet") arithmetic: value plus the first N derivatives of a
// scalar function of one variable, propagated through arithmetic and a few
// elementary functions.  Used to differentiate the closed-form cutoff chi_1
// analytically to any order needed by the integration-by-parts machinery.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace poincare {

template <std::size_t N>
struct Jet {
    // c[k] = f^{(k)}(t0) / k!   (Taylor coefficients, not raw derivatives)
    std::array<double, N + 1> c{};

    Jet() = default;
    explicit Jet(double value) { c[0] = value; }

    static Jet variable(double t0) {
        Jet j(t0);
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }
    // k-th derivative (k <= N)
    double derivative(std::size_t k) const {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= double(i);
        return c[k] * f;
    }

    Jet operator-() const {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) r.c[k] = -c[k];
        return r;
    }
    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) r.c[k] = a.c[k] - b.c[k];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k)
            for (std::size_t i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
        return r;
    }
    friend Jet operator*(double s, const Jet& a) {
        Jet r;
        for (std::size_t k = 0; k <= N; ++k) r.c[k] = s * a.c[k];
        return r;
    }
    friend Jet operator+(const Jet& a, double s) { Jet r = a; r.c[0] += s; return r; }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator-(const Jet& a, double s) { Jet r = a; r.c[0] -= s; return r; }
};

// reciprocal: r = 1/a, by the convolution recursion r_k = -(1/a_0) sum_{i>=1} a_i r_{k-i}
template <std::size_t N>
Jet<N> recip(const Jet<N>& a) {
    if (a.c[0] == 0.0) throw std::domain_error("Jet recip: division by zero value");
    Jet<N> r;
    r.c[0] = 1.0 / a.c[0];
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) s += a.c[i] * r.c[k - i];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

template <std::size_t N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * recip(b); }

// exp via e_k = (1/k) sum_{i=1..k} i a_i e_{k-i}
template <std::size_t N>
Jet<N> exp(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::exp(a.c[0]);
    for (std::size_t k = 1; k <= N; ++k) {
        double s = 0.0;
        for (std::size_t i = 1; i <= k; ++i) s += double(i) * a.c[i] * r.c[k - i];
        r.c[k] = s / double(k);
    }
    return r;
}

// integer power by repeated multiplication (small exponents only)
template <std::size_t N>
Jet<N> pow_int(const Jet<N>& a, int p) {
    Jet<N> r(1.0);
    for (int i = 0; i < p; ++i) r = r * a;
    return r;
}

} // namespace poincare
