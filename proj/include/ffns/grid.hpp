#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "ffns/errors.hpp"

struct fftw_plan_s;

namespace ffns {

using cplx = std::complex<double>;

/// Tensor-product grid for the flattened strip [0,L)^2 x [-b,0].
///
/// Horizontal directions are uniform and periodic (Fourier), the vertical
/// direction uses Chebyshev-Gauss-Lobatto collocation nodes including both
/// endpoints, so boundary traces are exact nodal reads. The grid owns the
/// collocation differentiation matrix, quadrature weights and FFT plans;
/// everything downstream shares it through shared_ptr<const Grid>.
class Grid {
  public:
    Grid(double L, int ny, int nz, double b);
    ~Grid();

    Grid(const Grid&) = delete;
    Grid& operator=(const Grid&) = delete;

    double L;  // horizontal period, both directions
    int ny;    // modes per horizontal direction (even)
    int nz;    // vertical collocation points
    double b;  // depth

    // nodes
    std::vector<double> y;   // ny, y_i = i L / ny
    std::vector<double> z;   // nz, ascending, z[0] = -b, z[nz-1] = 0
    std::vector<double> zw;  // Clenshaw-Curtis weights on [-b, 0]
    double hw;               // horizontal quadrature weight (L/ny)^2

    // vertical differentiation matrix, row-major nz x nz
    std::vector<double> Dz;

    // integer wavenumber index per horizontal array index: 0,1,..,ny/2,-(ny/2-1),..,-1
    std::vector<int> kidx;
    // physical wavenumber 2*pi/L * kidx, with the Nyquist entry zeroed for odd derivatives
    std::vector<double> kx;
    std::vector<double> kx_deriv;
    // 2/3-rule mask per (i1,i2) horizontal mode pair: 1.0 keep, 0.0 drop
    std::vector<double> dealias_mask;
    int kmax_dealias;  // largest retained |kidx|

    std::size_t nyy() const { return std::size_t(ny) * ny; }
    std::size_t nvol() const { return std::size_t(nz) * ny * ny; }
    std::size_t vidx(int j, int i1, int i2) const {
        return (std::size_t(j) * ny + i1) * ny + i2;
    }
    std::size_t sidx(int i1, int i2) const { return std::size_t(i1) * ny + i2; }

    // unnormalized forward / normalized backward 2-D transforms applied to
    // nslabs contiguous ny*ny slabs; safe to call concurrently
    void fft_forward(cplx* data, int nslabs) const;
    void fft_backward(cplx* data, int nslabs) const;

    bool same_layout(const Grid& o) const {
        return L == o.L && ny == o.ny && nz == o.nz && b == o.b;
    }

  private:
    fftw_plan_s* plan_fwd_vol_ = nullptr;
    fftw_plan_s* plan_bwd_vol_ = nullptr;
    fftw_plan_s* plan_fwd_surf_ = nullptr;
    fftw_plan_s* plan_bwd_surf_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(double L, int ny, int nz, double b);

} // namespace ffns
