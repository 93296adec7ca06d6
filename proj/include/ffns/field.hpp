#pragma once

#include <array>
#include <vector>

#include "ffns/grid.hpp"

namespace ffns {

/// Real scalar on the horizontal torus (free-surface data, traces).
struct SurfaceField {
    GridPtr grid;
    std::vector<double> a;

    SurfaceField() = default;
    explicit SurfaceField(GridPtr g) : grid(std::move(g)), a(grid->nyy(), 0.0) {}

    double& operator()(int i1, int i2) { return a[grid->sidx(i1, i2)]; }
    double operator()(int i1, int i2) const { return a[grid->sidx(i1, i2)]; }
};

/// Real scalar on the full strip grid, z-major slabs.
struct VolumeField {
    GridPtr grid;
    std::vector<double> a;

    VolumeField() = default;
    explicit VolumeField(GridPtr g) : grid(std::move(g)), a(grid->nvol(), 0.0) {}

    double& operator()(int j, int i1, int i2) { return a[grid->vidx(j, i1, i2)]; }
    double operator()(int j, int i1, int i2) const { return a[grid->vidx(j, i1, i2)]; }
};

/// Three-component field; component 3 is the vertical one.
struct VectorField {
    std::array<VolumeField, 3> c;

    VectorField() = default;
    explicit VectorField(const GridPtr& g) : c{VolumeField(g), VolumeField(g), VolumeField(g)} {}
    VolumeField& operator[](int i) { return c[i]; }
    const VolumeField& operator[](int i) const { return c[i]; }
    GridPtr grid() const { return c[0].grid; }
};

/// Symmetric 3x3 nodal tensor, components xx,xy,xz,yy,yz,zz.
struct SymTensorField {
    std::array<VolumeField, 6> c;

    SymTensorField() = default;
    explicit SymTensorField(const GridPtr& g)
        : c{VolumeField(g), VolumeField(g), VolumeField(g),
            VolumeField(g), VolumeField(g), VolumeField(g)} {}

    static int comp(int i, int j) {
        static const int map[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return map[i][j];
    }
    VolumeField& operator()(int i, int j) { return c[comp(i, j)]; }
    const VolumeField& operator()(int i, int j) const { return c[comp(i, j)]; }
};

// ---- elementwise arithmetic -------------------------------------------------

SurfaceField operator+(const SurfaceField& f, const SurfaceField& g);
SurfaceField operator-(const SurfaceField& f, const SurfaceField& g);
SurfaceField operator*(double s, const SurfaceField& f);
SurfaceField operator*(const SurfaceField& f, const SurfaceField& g);
VolumeField operator+(const VolumeField& f, const VolumeField& g);
VolumeField operator-(const VolumeField& f, const VolumeField& g);
VolumeField operator*(double s, const VolumeField& f);
VolumeField operator*(const VolumeField& f, const VolumeField& g);
VectorField operator+(const VectorField& f, const VectorField& g);
VectorField operator-(const VectorField& f, const VectorField& g);
VectorField operator*(double s, const VectorField& f);

void axpy(double alpha, const SurfaceField& x, SurfaceField& y);
void axpy(double alpha, const VolumeField& x, VolumeField& y);
void axpy(double alpha, const VectorField& x, VectorField& y);

// ---- transforms and derivatives --------------------------------------------

std::vector<cplx> to_spectral(const SurfaceField& f);
std::vector<cplx> to_spectral(const VolumeField& f);
SurfaceField surface_from_spectral(const GridPtr& g, std::vector<cplx> spec);
VolumeField volume_from_spectral(const GridPtr& g, std::vector<cplx> spec);

// spectral-domain helpers (act in place on forward-transform data)
void spec_derivative(const Grid& g, cplx* spec, int nslabs, int axis);
void spec_dealias(const Grid& g, cplx* spec, int nslabs);
void spec_lambda(const Grid& g, cplx* spec, int nslabs, double s);

SurfaceField horizontal_derivative(const SurfaceField& f, int axis);
VolumeField horizontal_derivative(const VolumeField& f, int axis);
VolumeField vertical_derivative(const VolumeField& f);

// dst = Dz * src along z, raw slab interface used by hot loops
void apply_Dz(const Grid& g, const double* src, double* dst);

SurfaceField dealias(const SurfaceField& f);
VolumeField dealias(const VolumeField& f);
void dealias_inplace(SurfaceField& f);
void dealias_inplace(VolumeField& f);

/// Product of two fields followed by 2/3-rule truncation.
SurfaceField multiply_dealias(const SurfaceField& f, const SurfaceField& g);
VolumeField multiply_dealias(const VolumeField& f, const VolumeField& g);

/// Z_1, Z_2 = horizontal derivatives, Z_3 = z(z+b) d/dz.
VolumeField conormal_derivative(const VolumeField& f, int index);

/// Fourier multiplier (1+|k|^2)^(s/2).
SurfaceField lambda_s(const SurfaceField& f, double s);
/// Tangential multiplier applied level by level.
VolumeField lambda_s(const VolumeField& f, double s);

// ---- reductions and traces ---------------------------------------------------

double max_abs(const SurfaceField& f);
double max_abs(const VolumeField& f);
double max_abs(const VectorField& f);

double surf_integral(const SurfaceField& f);
double vol_integral(const VolumeField& f);

double l2_norm(const SurfaceField& f);  // sqrt(int f^2 dy)
double l2_norm(const VolumeField& f);   // sqrt(int f^2 dy dz), flat measure
double l2_norm(const VectorField& f);

double mean(const SurfaceField& f);
double mean(const VolumeField& f);  // volume average, flat measure

SurfaceField trace_top(const VolumeField& f);
SurfaceField trace_bottom(const VolumeField& f);
void set_top(VolumeField& f, const SurfaceField& s);
void set_bottom(VolumeField& f, const SurfaceField& s);

} // namespace ffns
