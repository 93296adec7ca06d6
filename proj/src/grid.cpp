#include "ffns/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace ffns {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Grid::Grid(double L_, int ny_, int nz_, double b_) : L(L_), ny(ny_), nz(nz_), b(b_) {
    if (L <= 0.0 || b <= 0.0)
        throw Error(ErrorCode::ConfigError, "grid: period and depth must be positive");
    if (ny < 8 || ny % 2 != 0)
        throw Error(ErrorCode::ConfigError, "grid: ny must be even and >= 8");
    if (nz < 8)
        throw Error(ErrorCode::ConfigError, "grid: nz must be >= 8");

    y.resize(ny);
    for (int i = 0; i < ny; ++i) y[i] = L * i / ny;
    hw = (L / ny) * (L / ny);

    // Chebyshev-Gauss-Lobatto nodes mapped to [-b,0], ascending in z.
    const int n = nz - 1;
    z.resize(nz);
    for (int j = 0; j <= n; ++j) z[j] = -0.5 * b * (1.0 + std::cos(M_PI * j / n));
    z[0] = -b;
    z[n] = 0.0;

    // Clenshaw-Curtis weights on [-1,1], then scaled by b/2.
    zw.assign(nz, 0.0);
    {
        std::vector<double> v(n - 1, 1.0);
        if (n % 2 == 0) {
            zw[0] = zw[n] = 1.0 / (double(n) * n - 1.0);
            for (int k = 1; k <= n / 2 - 1; ++k)
                for (int i = 1; i < n; ++i)
                    v[i - 1] -= 2.0 * std::cos(2.0 * k * M_PI * i / n) / (4.0 * k * k - 1.0);
            for (int i = 1; i < n; ++i)
                v[i - 1] -= std::cos(M_PI * i) / (double(n) * n - 1.0);
        } else {
            zw[0] = zw[n] = 1.0 / (double(n) * n);
            for (int k = 1; k <= (n - 1) / 2; ++k)
                for (int i = 1; i < n; ++i)
                    v[i - 1] -= 2.0 * std::cos(2.0 * k * M_PI * i / n) / (4.0 * k * k - 1.0);
        }
        for (int i = 1; i < n; ++i) zw[i] = 2.0 * v[i - 1] / n;
        for (int j = 0; j <= n; ++j) zw[j] *= 0.5 * b;
    }

    // Differentiation matrix (Trefethen) with the negative-sum trick, mapped
    // by dz/dx = -b/2.
    Dz.assign(std::size_t(nz) * nz, 0.0);
    {
        std::vector<double> x(nz), c(nz);
        for (int j = 0; j <= n; ++j) x[j] = std::cos(M_PI * j / n);
        for (int j = 0; j <= n; ++j) c[j] = (j == 0 || j == n) ? 2.0 : 1.0;
        for (int j = 0; j <= n; ++j) c[j] *= (j % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i <= n; ++i) {
            double rowsum = 0.0;
            for (int j = 0; j <= n; ++j) {
                if (i == j) continue;
                double d = (c[i] / c[j]) / (x[i] - x[j]);
                Dz[std::size_t(i) * nz + j] = -2.0 / b * d;
                rowsum += d;
            }
            Dz[std::size_t(i) * nz + i] = -2.0 / b * (-rowsum);
        }
    }

    kidx.resize(ny);
    kx.resize(ny);
    kx_deriv.resize(ny);
    for (int i = 0; i < ny; ++i) {
        kidx[i] = (i <= ny / 2) ? i : i - ny;
        kx[i] = 2.0 * M_PI / L * kidx[i];
        kx_deriv[i] = (i == ny / 2) ? 0.0 : kx[i];
    }

    kmax_dealias = ny / 3;
    dealias_mask.assign(nyy(), 0.0);
    for (int i1 = 0; i1 < ny; ++i1)
        for (int i2 = 0; i2 < ny; ++i2)
            if (std::abs(kidx[i1]) <= kmax_dealias && std::abs(kidx[i2]) <= kmax_dealias)
                dealias_mask[sidx(i1, i2)] = 1.0;

    // FFT plans; planned once under a global lock, executed via the
    // new-array interface so concurrent use on distinct buffers is safe.
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        std::vector<cplx> scratch(nvol());
        fftw_complex* p = reinterpret_cast<fftw_complex*>(scratch.data());
        int dims[2] = {ny, ny};
        unsigned flags = FFTW_MEASURE | FFTW_UNALIGNED;
        plan_fwd_vol_ = fftw_plan_many_dft(2, dims, nz, p, nullptr, 1, ny * ny, p, nullptr,
                                           1, ny * ny, FFTW_FORWARD, flags);
        plan_bwd_vol_ = fftw_plan_many_dft(2, dims, nz, p, nullptr, 1, ny * ny, p, nullptr,
                                           1, ny * ny, FFTW_BACKWARD, flags);
        plan_fwd_surf_ = fftw_plan_many_dft(2, dims, 1, p, nullptr, 1, ny * ny, p, nullptr,
                                            1, ny * ny, FFTW_FORWARD, flags);
        plan_bwd_surf_ = fftw_plan_many_dft(2, dims, 1, p, nullptr, 1, ny * ny, p, nullptr,
                                            1, ny * ny, FFTW_BACKWARD, flags);
        if (!plan_fwd_vol_ || !plan_bwd_vol_ || !plan_fwd_surf_ || !plan_bwd_surf_)
            throw Error(ErrorCode::ConfigError, "grid: fftw planning failed");
    }
}

Grid::~Grid() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan_fwd_vol_) fftw_destroy_plan(plan_fwd_vol_);
    if (plan_bwd_vol_) fftw_destroy_plan(plan_bwd_vol_);
    if (plan_fwd_surf_) fftw_destroy_plan(plan_fwd_surf_);
    if (plan_bwd_surf_) fftw_destroy_plan(plan_bwd_surf_);
}

void Grid::fft_forward(cplx* data, int nslabs) const {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
    if (nslabs == nz) {
        fftw_execute_dft(plan_fwd_vol_, p, p);
    } else {
        for (int s = 0; s < nslabs; ++s) {
            fftw_complex* q = reinterpret_cast<fftw_complex*>(data + std::size_t(s) * nyy());
            fftw_execute_dft(plan_fwd_surf_, q, q);
        }
    }
}

void Grid::fft_backward(cplx* data, int nslabs) const {
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
    if (nslabs == nz) {
        fftw_execute_dft(plan_bwd_vol_, p, p);
    } else {
        for (int s = 0; s < nslabs; ++s) {
            fftw_complex* q = reinterpret_cast<fftw_complex*>(data + std::size_t(s) * nyy());
            fftw_execute_dft(plan_bwd_surf_, q, q);
        }
    }
    const double scale = 1.0 / (double(ny) * ny);
    const std::size_t total = std::size_t(nslabs) * nyy();
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
}

GridPtr make_grid(double L, int ny, int nz, double b) {
    return std::make_shared<const Grid>(L, ny, nz, b);
}

} // namespace ffns
