#include "ffns/field.hpp"

#include <algorithm>
#include <cmath>

namespace ffns {

namespace {

template <class F>
F binop(const F& f, const F& g, double sf, double sg) {
    F out(f.grid);
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = sf * f.a[i] + sg * g.a[i];
    return out;
}

} // namespace

SurfaceField operator+(const SurfaceField& f, const SurfaceField& g) { return binop(f, g, 1, 1); }
SurfaceField operator-(const SurfaceField& f, const SurfaceField& g) { return binop(f, g, 1, -1); }
VolumeField operator+(const VolumeField& f, const VolumeField& g) { return binop(f, g, 1, 1); }
VolumeField operator-(const VolumeField& f, const VolumeField& g) { return binop(f, g, 1, -1); }

SurfaceField operator*(double s, const SurfaceField& f) {
    SurfaceField out(f.grid);
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = s * f.a[i];
    return out;
}
VolumeField operator*(double s, const VolumeField& f) {
    VolumeField out(f.grid);
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = s * f.a[i];
    return out;
}
SurfaceField operator*(const SurfaceField& f, const SurfaceField& g) {
    SurfaceField out(f.grid);
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = f.a[i] * g.a[i];
    return out;
}
VolumeField operator*(const VolumeField& f, const VolumeField& g) {
    VolumeField out(f.grid);
    for (std::size_t i = 0; i < f.a.size(); ++i) out.a[i] = f.a[i] * g.a[i];
    return out;
}
VectorField operator+(const VectorField& f, const VectorField& g) {
    VectorField out;
    for (int i = 0; i < 3; ++i) out.c[i] = f.c[i] + g.c[i];
    return out;
}
VectorField operator-(const VectorField& f, const VectorField& g) {
    VectorField out;
    for (int i = 0; i < 3; ++i) out.c[i] = f.c[i] - g.c[i];
    return out;
}
VectorField operator*(double s, const VectorField& f) {
    VectorField out;
    for (int i = 0; i < 3; ++i) out.c[i] = s * f.c[i];
    return out;
}

void axpy(double alpha, const SurfaceField& x, SurfaceField& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) y.a[i] += alpha * x.a[i];
}
void axpy(double alpha, const VolumeField& x, VolumeField& y) {
    for (std::size_t i = 0; i < x.a.size(); ++i) y.a[i] += alpha * x.a[i];
}
void axpy(double alpha, const VectorField& x, VectorField& y) {
    for (int i = 0; i < 3; ++i) axpy(alpha, x.c[i], y.c[i]);
}

// ---- transforms -------------------------------------------------------------

std::vector<cplx> to_spectral(const SurfaceField& f) {
    std::vector<cplx> spec(f.a.begin(), f.a.end());
    f.grid->fft_forward(spec.data(), 1);
    return spec;
}

std::vector<cplx> to_spectral(const VolumeField& f) {
    std::vector<cplx> spec(f.a.begin(), f.a.end());
    f.grid->fft_forward(spec.data(), f.grid->nz);
    return spec;
}

SurfaceField surface_from_spectral(const GridPtr& g, std::vector<cplx> spec) {
    g->fft_backward(spec.data(), 1);
    SurfaceField out(g);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = spec[i].real();
    return out;
}

VolumeField volume_from_spectral(const GridPtr& g, std::vector<cplx> spec) {
    g->fft_backward(spec.data(), g->nz);
    VolumeField out(g);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] = spec[i].real();
    return out;
}

void spec_derivative(const Grid& g, cplx* spec, int nslabs, int axis) {
    const int ny = g.ny;
    for (int s = 0; s < nslabs; ++s) {
        cplx* slab = spec + std::size_t(s) * g.nyy();
        for (int i1 = 0; i1 < ny; ++i1) {
            for (int i2 = 0; i2 < ny; ++i2) {
                double k = (axis == 1) ? g.kx_deriv[i1] : g.kx_deriv[i2];
                slab[std::size_t(i1) * ny + i2] *= cplx(0.0, k);
            }
        }
    }
}

void spec_dealias(const Grid& g, cplx* spec, int nslabs) {
    for (int s = 0; s < nslabs; ++s) {
        cplx* slab = spec + std::size_t(s) * g.nyy();
        for (std::size_t i = 0; i < g.nyy(); ++i) slab[i] *= g.dealias_mask[i];
    }
}

void spec_lambda(const Grid& g, cplx* spec, int nslabs, double s) {
    const int ny = g.ny;
    for (int sl = 0; sl < nslabs; ++sl) {
        cplx* slab = spec + std::size_t(sl) * g.nyy();
        for (int i1 = 0; i1 < ny; ++i1) {
            for (int i2 = 0; i2 < ny; ++i2) {
                double k2 = g.kx[i1] * g.kx[i1] + g.kx[i2] * g.kx[i2];
                slab[std::size_t(i1) * ny + i2] *= std::pow(1.0 + k2, 0.5 * s);
            }
        }
    }
}

SurfaceField horizontal_derivative(const SurfaceField& f, int axis) {
    auto spec = to_spectral(f);
    spec_derivative(*f.grid, spec.data(), 1, axis);
    return surface_from_spectral(f.grid, std::move(spec));
}

VolumeField horizontal_derivative(const VolumeField& f, int axis) {
    auto spec = to_spectral(f);
    spec_derivative(*f.grid, spec.data(), f.grid->nz, axis);
    return volume_from_spectral(f.grid, std::move(spec));
}

void apply_Dz(const Grid& g, const double* src, double* dst) {
    const std::size_t slab = g.nyy();
    for (int j = 0; j < g.nz; ++j) {
        double* out = dst + std::size_t(j) * slab;
        std::fill(out, out + slab, 0.0);
        const double* row = g.Dz.data() + std::size_t(j) * g.nz;
        for (int m = 0; m < g.nz; ++m) {
            const double w = row[m];
            if (w == 0.0) continue;
            const double* in = src + std::size_t(m) * slab;
            for (std::size_t i = 0; i < slab; ++i) out[i] += w * in[i];
        }
    }
}

VolumeField vertical_derivative(const VolumeField& f) {
    VolumeField out(f.grid);
    apply_Dz(*f.grid, f.a.data(), out.a.data());
    return out;
}

SurfaceField dealias(const SurfaceField& f) {
    auto spec = to_spectral(f);
    spec_dealias(*f.grid, spec.data(), 1);
    return surface_from_spectral(f.grid, std::move(spec));
}

VolumeField dealias(const VolumeField& f) {
    auto spec = to_spectral(f);
    spec_dealias(*f.grid, spec.data(), f.grid->nz);
    return volume_from_spectral(f.grid, std::move(spec));
}

void dealias_inplace(SurfaceField& f) { f = dealias(f); }
void dealias_inplace(VolumeField& f) { f = dealias(f); }

SurfaceField multiply_dealias(const SurfaceField& f, const SurfaceField& g) {
    return dealias(f * g);
}
VolumeField multiply_dealias(const VolumeField& f, const VolumeField& g) {
    return dealias(f * g);
}

VolumeField conormal_derivative(const VolumeField& f, int index) {
    if (index == 1 || index == 2) return horizontal_derivative(f, index);
    VolumeField out = vertical_derivative(f);
    const Grid& g = *f.grid;
    for (int j = 0; j < g.nz; ++j) {
        const double w = g.z[j] * (g.z[j] + g.b);
        double* slab = out.a.data() + std::size_t(j) * g.nyy();
        for (std::size_t i = 0; i < g.nyy(); ++i) slab[i] *= w;
    }
    // the weight vanishes at both endpoints; pin the boundary planes so the
    // tangency is exact and not left to roundoff
    std::fill(out.a.begin(), out.a.begin() + g.nyy(), 0.0);
    std::fill(out.a.end() - g.nyy(), out.a.end(), 0.0);
    return out;
}

SurfaceField lambda_s(const SurfaceField& f, double s) {
    auto spec = to_spectral(f);
    spec_lambda(*f.grid, spec.data(), 1, s);
    return surface_from_spectral(f.grid, std::move(spec));
}

VolumeField lambda_s(const VolumeField& f, double s) {
    auto spec = to_spectral(f);
    spec_lambda(*f.grid, spec.data(), f.grid->nz, s);
    return volume_from_spectral(f.grid, std::move(spec));
}

// ---- reductions ---------------------------------------------------------------

double max_abs(const SurfaceField& f) {
    double m = 0.0;
    for (double v : f.a) m = std::max(m, std::abs(v));
    return m;
}
double max_abs(const VolumeField& f) {
    double m = 0.0;
    for (double v : f.a) m = std::max(m, std::abs(v));
    return m;
}
double max_abs(const VectorField& f) {
    return std::max({max_abs(f.c[0]), max_abs(f.c[1]), max_abs(f.c[2])});
}

double surf_integral(const SurfaceField& f) {
    double s = 0.0;
    for (double v : f.a) s += v;
    return s * f.grid->hw;
}

double vol_integral(const VolumeField& f) {
    const Grid& g = *f.grid;
    double s = 0.0;
    for (int j = 0; j < g.nz; ++j) {
        const double* slab = f.a.data() + std::size_t(j) * g.nyy();
        double sj = 0.0;
        for (std::size_t i = 0; i < g.nyy(); ++i) sj += slab[i];
        s += g.zw[j] * sj;
    }
    return s * g.hw;
}

double l2_norm(const SurfaceField& f) {
    double s = 0.0;
    for (double v : f.a) s += v * v;
    return std::sqrt(s * f.grid->hw);
}

double l2_norm(const VolumeField& f) {
    const Grid& g = *f.grid;
    double s = 0.0;
    for (int j = 0; j < g.nz; ++j) {
        const double* slab = f.a.data() + std::size_t(j) * g.nyy();
        double sj = 0.0;
        for (std::size_t i = 0; i < g.nyy(); ++i) sj += slab[i] * slab[i];
        s += g.zw[j] * sj;
    }
    return std::sqrt(s * g.hw);
}

double l2_norm(const VectorField& f) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        double n = l2_norm(f.c[i]);
        s += n * n;
    }
    return std::sqrt(s);
}

double mean(const SurfaceField& f) { return surf_integral(f) / (f.grid->L * f.grid->L); }
double mean(const VolumeField& f) { return vol_integral(f) / (f.grid->L * f.grid->L * f.grid->b); }

SurfaceField trace_top(const VolumeField& f) {
    const Grid& g = *f.grid;
    SurfaceField out(f.grid);
    std::copy(f.a.end() - g.nyy(), f.a.end(), out.a.begin());
    return out;
}

SurfaceField trace_bottom(const VolumeField& f) {
    const Grid& g = *f.grid;
    SurfaceField out(f.grid);
    std::copy(f.a.begin(), f.a.begin() + g.nyy(), out.a.begin());
    return out;
}

void set_top(VolumeField& f, const SurfaceField& s) {
    std::copy(s.a.begin(), s.a.end(), f.a.end() - f.grid->nyy());
}

void set_bottom(VolumeField& f, const SurfaceField& s) {
    std::copy(s.a.begin(), s.a.end(), f.a.begin());
}

} // namespace ffns
