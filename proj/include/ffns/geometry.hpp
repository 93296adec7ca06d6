#pragma once

#include "ffns/field.hpp"

namespace ffns {

/// All flattening data at one time instant, built from the surface height.
/// phi = z + eta, J = dz(phi), N = (-d1(phi), -d2(phi), 1), n = N/|N|,
/// Pi = I - n (x) n, E = P P^t / J. Immutable after build_geometry.
struct GeometryBundle {
    GridPtr grid;
    double A = 0.0;   // extension rate
    double c0 = 0.0;  // positivity floor

    SurfaceField h;      // surface height
    SurfaceField dh_dt;  // kinematic right side used for dt(phi)
    VolumeField eta;     // extension of h
    VolumeField phi;     // z + eta
    VolumeField dt_phi;  // extension of dh_dt
    VolumeField px, py;  // d1(phi), d2(phi)
    VolumeField J;       // dz(phi), the dV_t weight
    VolumeField E33;     // (1 + px^2 + py^2)/J ; E11 = E22 = J, E13 = -px, E23 = -py
    VolumeField absN;    // |N|
    VectorField n;       // unit normal extension
    SymTensorField Pi;   // tangential projector
    SurfaceField H;      // twice the mean curvature of h

    double min_J = 0.0;
};

/// Modewise lift (1 + z/b) exp(A|xi|z) of a surface field into the strip.
VolumeField extend_height(const SurfaceField& h, double A);

struct ChooseAResult {
    double A;
    double margin;  // min dz(phi0) - required floor
};

/// Largest lattice value A_max 2^-j with min dz(phi0) >= (1 + min h0 / b)/2.
ChooseAResult choose_A(const SurfaceField& h0, double b, double A_max);

GeometryBundle build_geometry(const SurfaceField& h, const SurfaceField& dh_dt, double A,
                              double c0);

/// H = div( grad h / sqrt(1 + |grad h|^2) ), dealiased.
SurfaceField mean_curvature(const SurfaceField& h);

// E * w and v . N as pointwise operations on bundle data
VectorField apply_E(const GeometryBundle& G, const VectorField& w);
VolumeField dot_N(const GeometryBundle& G, const VectorField& v);
/// P v = (J v1, J v2, v . N)
VectorField apply_P(const GeometryBundle& G, const VectorField& v);

/// Normal geodesic chart samples near the free surface (diagnostic only).
struct GeodesicChart {
    std::vector<double> zlev;  // collar levels in (-delta, 0]
    // metric components per level, index [level]
    std::vector<SurfaceField> g11, g12, g22, g13, g23, g33, detg;
    std::vector<std::array<SurfaceField, 3>> psi;  // chart samples
    double max_offblock = 0.0;                     // max |g13|,|g23|,|g33-1|
};

GeodesicChart geodesic_chart(const SurfaceField& h, double delta, int nlev = 9);

/// w3 on {z=0} in the geodesic chart: (v.N^b - dh/dt)/|N^b|; vanishes when the
/// kinematic condition holds.
SurfaceField chart_w3(const SurfaceField& v1_top, const SurfaceField& v2_top,
                      const SurfaceField& v3_top, const SurfaceField& h,
                      const SurfaceField& dh_dt);

} // namespace ffns
