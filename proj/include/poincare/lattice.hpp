#pragma once

// Lattice-point enumeration of 2*pi*Z^d under the Finsler distance, the
// counting function, and the singular-spectrum table Lambda_K.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "poincare/geometry.hpp"

namespace poincare {
namespace lat {

using geom::ConvexTarget;
using geom::SupportBody;
using geom::Vec;

struct NormEquivalence {
    double m = 0; // m h_K(xi) <= |xi|
    double M = 0; // |xi| <= M h_K(xi)
    double min_h = 0, max_h = 0; // extrema of h_K on the unit sphere (pre-margin)
};

// Certified grid-plus-margin constants with m h_K(xi) <= |xi| <= M h_K(xi).
// Verified on the unit sphere with the Lipschitz safety margin |grad h| <= max|v|.
inline NormEquivalence norm_equivalence(const SupportBody& b) {
    const int d = b.dim();
    double minh = 1e300, maxh = -1e300;
    double lip = b.max_boundary_norm();
    double spacing;
    if (d == 2) {
        // per-arc second-order bounds: between grid nodes, h deviates from the
        // node value by at most |h'| delta + C delta^2 / 2
        const int n = 8192;
        const double delta = 2.0 * M_PI / n;
        double hppmax = 0;
        std::vector<double> hv(n), hp(n);
        for (int i = 0; i < n; ++i) {
            auto j = b.hhat_jet<2>(2.0 * M_PI * i / n);
            hv[i] = j.value();
            hp[i] = j.derivative(1);
            hppmax = std::max(hppmax, std::abs(j.derivative(2)));
        }
        hppmax *= 1.05;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < n; ++i) {
            int k = (i + 1) % n;
            double curv = 0.5 * hppmax * delta * delta;
            lo = std::min(lo, std::max(hv[i] - std::abs(hp[i]) * delta, hv[k] - std::abs(hp[k]) * delta) - curv);
            hi = std::max(hi, std::min(hv[i] + std::abs(hp[i]) * delta, hv[k] + std::abs(hp[k]) * delta) + curv);
            minh = std::min(minh, hv[i]);
            maxh = std::max(maxh, hv[i]);
        }
        if (lo <= 0) throw numeric_error("norm_equivalence: degenerate body");
        NormEquivalence ne;
        ne.min_h = minh;
        ne.max_h = maxh;
        ne.m = 1.0 / hi;
        ne.M = 1.0 / lo;
        return ne;
    }
    if (d == 3) {
        const int np = 256, na = 512;
        spacing = M_PI / np;
        for (int i = 0; i <= np; ++i)
            for (int j = 0; j < na; ++j) {
                double pol = M_PI * i / np, az = 2.0 * M_PI * j / na;
                Vec th = {std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az), std::cos(pol)};
                double h = b.support(th);
                minh = std::min(minh, h);
                maxh = std::max(maxh, h);
            }
    } else {
        // closed-form families only
        if (b.family() == geom::Family::ball) {
            minh = maxh = b.ball_radius();
            spacing = 0;
        } else {
            throw numeric_error("norm_equivalence: unsupported dimension");
        }
    }
    double margin = lip * spacing;
    if (minh - margin <= 0) throw numeric_error("norm_equivalence: degenerate body");
    NormEquivalence ne;
    ne.min_h = minh;
    ne.max_h = maxh;
    ne.m = 1.0 / (maxh + margin);
    ne.M = 1.0 / (minh - margin);
    return ne;
}

struct LatticePoint {
    std::array<std::int64_t, 3> k{}; // x = 2*pi*k
    double distance = 0;             // d_K(T, x)
};

// All lattice points of 2*pi*Z^d at Finsler distance <= Tmax from the target,
// points inside the target excluded, in lexicographic order of k.
inline std::vector<LatticePoint> enumerate_points(const SupportBody& b, const ConvexTarget& t,
                                                  double Tmax) {
    if (!(Tmax > 0)) throw std::domain_error("enumerate: Tmax must be positive");
    const int d = b.dim();
    const auto ne = norm_equivalence(b);
    double center_norm = t.is_point() ? geom::norm(t.point_coords()) : t.as_body().max_boundary_norm();
    double bound = Tmax * (ne.max_h + 1e-12) + center_norm + 1e-9;
    std::int64_t kmax = std::int64_t(std::ceil(bound / (2.0 * M_PI)));
    const bool fast = (b.family() != geom::Family::trig2d) && t.is_point();
    std::vector<LatticePoint> out;
    auto consider = [&](std::array<std::int64_t, 3> k) {
        Vec x(d);
        for (int i = 0; i < d; ++i) x[i] = 2.0 * M_PI * double(k[i]);
        double dist;
        if (fast) {
            Vec u(d);
            for (int i = 0; i < d; ++i) u[i] = x[i] - t.point_coords()[i];
            if (geom::norm(u) == 0) return; // the target point itself
            dist = geom::gauge_closed(b, u);
        } else {
            dist = geom::finsler_distance(b, t, x);
            if (dist == 0.0) return; // inside the target
        }
        if (dist <= Tmax) out.push_back({k, dist});
    };
    if (d == 2) {
        for (std::int64_t i = -kmax; i <= kmax; ++i)
            for (std::int64_t j = -kmax; j <= kmax; ++j) consider({i, j, 0});
    } else if (d == 3) {
        for (std::int64_t i = -kmax; i <= kmax; ++i)
            for (std::int64_t j = -kmax; j <= kmax; ++j)
                for (std::int64_t l = -kmax; l <= kmax; ++l) consider({i, j, l});
    } else {
        throw std::domain_error("enumerate: d in {2,3} only");
    }
    return out;
}

inline std::size_t counting_function(const SupportBody& b, const ConvexTarget& t, double Tmax) {
    return enumerate_points(b, t, Tmax).size();
}

struct SpectrumEntry {
    double value = 0;                 // h_K(xi) (sign +) or h_{-K}(xi) (sign -)
    std::array<std::int64_t, 3> xi{}; // generating frequency in Z^d
    int sign = +1;
};

struct SpectrumTable {
    std::vector<SpectrumEntry> entries; // sorted ascending by value
    double lambda_max = 0;

    // distinct values merged within the stated tolerance, with multiplicities
    std::vector<std::pair<double, int>> merged(double tol = 1e-12) const {
        std::vector<std::pair<double, int>> out;
        for (const auto& e : entries) {
            if (!out.empty() && std::abs(e.value - out.back().first) <= tol)
                out.back().second += 1;
            else
                out.push_back({e.value, 1});
        }
        return out;
    }
};

// All entries {h_K(xi) sign +, h_K(-xi) sign -} with value <= lambda_max.
inline SpectrumTable spectrum(const SupportBody& b, double lambda_max) {
    if (!(lambda_max > 0)) throw std::domain_error("spectrum: lambda_max must be positive");
    const int d = b.dim();
    const auto ne = norm_equivalence(b);
    std::int64_t kmax = std::int64_t(std::ceil(ne.M * lambda_max));
    SpectrumTable tab;
    tab.lambda_max = lambda_max;
    auto consider = [&](std::array<std::int64_t, 3> k) {
        bool zero = true;
        for (int i = 0; i < d; ++i) zero = zero && (k[i] == 0);
        if (zero) return;
        Vec xi(d);
        for (int i = 0; i < d; ++i) xi[i] = double(k[i]);
        double hp = b.support(xi);
        if (hp <= lambda_max) tab.entries.push_back({hp, k, +1});
        Vec xim(d);
        for (int i = 0; i < d; ++i) xim[i] = -double(k[i]);
        double hm = b.support(xim);
        if (hm <= lambda_max) tab.entries.push_back({hm, k, -1});
    };
    if (d == 2) {
        for (std::int64_t i = -kmax; i <= kmax; ++i)
            for (std::int64_t j = -kmax; j <= kmax; ++j) consider({i, j, 0});
    } else if (d == 3) {
        for (std::int64_t i = -kmax; i <= kmax; ++i)
            for (std::int64_t j = -kmax; j <= kmax; ++j)
                for (std::int64_t l = -kmax; l <= kmax; ++l) consider({i, j, l});
    } else {
        throw std::domain_error("spectrum: d in {2,3} only");
    }
    std::sort(tab.entries.begin(), tab.entries.end(), [](const SpectrumEntry& a, const SpectrumEntry& b2) {
        if (a.value != b2.value) return a.value < b2.value;
        if (a.sign != b2.sign) return a.sign > b2.sign;
        return a.xi < b2.xi;
    });
    return tab;
}

} // namespace lat
} // namespace poincare
