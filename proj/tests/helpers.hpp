#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "ffns/field.hpp"
#include "ffns/geometry.hpp"

namespace ffns::testing {

inline SurfaceField surface_of(const GridPtr& g,
                               const std::function<double(double, double)>& f) {
    SurfaceField out(g);
    for (int i1 = 0; i1 < g->ny; ++i1)
        for (int i2 = 0; i2 < g->ny; ++i2) out(i1, i2) = f(g->y[i1], g->y[i2]);
    return out;
}

inline VolumeField volume_of(const GridPtr& g,
                             const std::function<double(double, double, double)>& f) {
    VolumeField out(g);
    for (int j = 0; j < g->nz; ++j)
        for (int i1 = 0; i1 < g->ny; ++i1)
            for (int i2 = 0; i2 < g->ny; ++i2) out(j, i1, i2) = f(g->y[i1], g->y[i2], g->z[j]);
    return out;
}

/// band-limited random surface field with decaying spectrum; the same seed
/// gives the same continuous field on any grid resolving kmax
inline SurfaceField random_surface(const GridPtr& g, unsigned seed, int kmax, double amp) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SurfaceField out(g);
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 == 0 && k2 == 0) continue;
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;  // one per conjugate pair
            const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
            const double a = amp * std::exp(-0.7 * kk) * gauss(rng);
            const double ph = 2.0 * M_PI * (gauss(rng) * 0.25);
            for (int i1 = 0; i1 < g->ny; ++i1)
                for (int i2 = 0; i2 < g->ny; ++i2)
                    out(i1, i2) += a * std::cos(2.0 * M_PI / g->L * (k1 * g->y[i1] + k2 * g->y[i2]) + ph);
        }
    }
    return out;
}

/// random volume field: band-limited horizontal modes x low-degree z-polynomials
inline VolumeField random_volume(const GridPtr& g, unsigned seed, int kmax, double amp) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VolumeField out(g);
    const int zdeg = 5;
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
        for (int k2 = -kmax; k2 <= kmax; ++k2) {
            if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;
            for (int d = 0; d <= zdeg; ++d) {
                const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
                const double a = amp * std::exp(-0.7 * kk) * std::pow(0.5, d) * gauss(rng);
                if (k1 == 0 && k2 == 0 && d == 0) continue;
                const double ph = 2.0 * M_PI * (gauss(rng) * 0.25);
                for (int j = 0; j < g->nz; ++j) {
                    const double zp = std::pow(1.0 + 2.0 * g->z[j] / g->b, d);  // in [-1,1]
                    for (int i1 = 0; i1 < g->ny; ++i1)
                        for (int i2 = 0; i2 < g->ny; ++i2)
                            out(j, i1, i2) +=
                                a * zp *
                                std::cos(2.0 * M_PI / g->L * (k1 * g->y[i1] + k2 * g->y[i2]) + ph);
                }
            }
        }
    }
    return out;
}

inline VectorField random_vector(const GridPtr& g, unsigned seed, int kmax, double amp) {
    VectorField out(g);
    for (int c = 0; c < 3; ++c) out.c[c] = random_volume(g, seed + 1000u * (c + 1), kmax, amp);
    return out;
}

inline double linf_diff(const VolumeField& a, const VolumeField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

inline double linf_diff(const SurfaceField& a, const SurfaceField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

} // namespace ffns::testing
