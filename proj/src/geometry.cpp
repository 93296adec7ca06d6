#include "ffns/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ffns {

VolumeField extend_height(const SurfaceField& h, double A) {
    const Grid& g = *h.grid;
    auto hs = to_spectral(h);
    std::vector<cplx> spec(g.nvol());
    for (int j = 0; j < g.nz; ++j) {
        const double zf = 1.0 + g.z[j] / g.b;
        cplx* slab = spec.data() + std::size_t(j) * g.nyy();
        for (int i1 = 0; i1 < g.ny; ++i1) {
            for (int i2 = 0; i2 < g.ny; ++i2) {
                const double kabs =
                    std::sqrt(g.kx[i1] * g.kx[i1] + g.kx[i2] * g.kx[i2]);
                slab[g.sidx(i1, i2)] = zf * std::exp(A * kabs * g.z[j]) * hs[g.sidx(i1, i2)];
            }
        }
    }
    VolumeField eta = volume_from_spectral(h.grid, std::move(spec));
    // both factors are exact at the endpoints; pin the traces so eta(.,0)=h
    // and eta(.,-b)=0 hold bitwise
    set_top(eta, h);
    std::fill(eta.a.begin(), eta.a.begin() + g.nyy(), 0.0);
    return eta;
}

ChooseAResult choose_A(const SurfaceField& h0, double b, double A_max) {
    if (A_max <= 0.0) throw Error(ErrorCode::ConfigError, "choose_A: A_max must be positive");
    double hmin = h0.a.empty() ? 0.0 : *std::min_element(h0.a.begin(), h0.a.end());
    if (hmin <= -b)
        throw Error(ErrorCode::SurfaceTouchesBottom,
                    "choose_A: min(h0) <= -b, surface touches the bottom");
    const double floor = 0.5 * (1.0 + hmin / b);
    const int max_halvings = 60;
    for (int j = 0; j <= max_halvings; ++j) {
        const double A = A_max * std::pow(2.0, -j);
        VolumeField eta = extend_height(h0, A);
        VolumeField dzeta = vertical_derivative(eta);
        double mn = 1e300;
        for (double v : dzeta.a) mn = std::min(mn, 1.0 + v);
        if (mn >= floor) return {A, mn - floor};
    }
    throw Error(ErrorCode::NoAdmissibleA,
                "choose_A: no admissible A on the lattice; h0 looks under-resolved");
}

SurfaceField mean_curvature(const SurfaceField& h) {
    SurfaceField hx = horizontal_derivative(h, 1);
    SurfaceField hy = horizontal_derivative(h, 2);
    SurfaceField u(h.grid), v(h.grid);
    for (std::size_t i = 0; i < h.a.size(); ++i) {
        const double r = 1.0 / std::sqrt(1.0 + hx.a[i] * hx.a[i] + hy.a[i] * hy.a[i]);
        u.a[i] = hx.a[i] * r;
        v.a[i] = hy.a[i] * r;
    }
    dealias_inplace(u);
    dealias_inplace(v);
    return horizontal_derivative(u, 1) + horizontal_derivative(v, 2);
}

GeometryBundle build_geometry(const SurfaceField& h, const SurfaceField& dh_dt, double A,
                              double c0) {
    GeometryBundle G;
    G.grid = h.grid;
    G.A = A;
    G.c0 = c0;
    G.h = h;
    G.dh_dt = dh_dt;
    G.eta = extend_height(h, A);
    G.dt_phi = extend_height(dh_dt, A);
    G.px = horizontal_derivative(G.eta, 1);
    G.py = horizontal_derivative(G.eta, 2);
    G.J = vertical_derivative(G.eta);
    for (double& v : G.J.a) v += 1.0;

    G.min_J = *std::min_element(G.J.a.begin(), G.J.a.end());
    if (G.min_J < 0.5 * c0)
        throw Error(ErrorCode::DiffeoViolated,
                    "build_geometry: min dz(phi) = " + std::to_string(G.min_J) +
                        " < c0/2 = " + std::to_string(0.5 * c0));

    const Grid& g = *h.grid;
    G.phi = VolumeField(h.grid);
    for (int j = 0; j < g.nz; ++j) {
        double* slab = G.phi.a.data() + std::size_t(j) * g.nyy();
        const double* e = G.eta.a.data() + std::size_t(j) * g.nyy();
        for (std::size_t i = 0; i < g.nyy(); ++i) slab[i] = g.z[j] + e[i];
    }

    G.E33 = VolumeField(h.grid);
    G.absN = VolumeField(h.grid);
    G.n = VectorField(h.grid);
    G.Pi = SymTensorField(h.grid);
    for (std::size_t i = 0; i < G.J.a.size(); ++i) {
        const double px = G.px.a[i], py = G.py.a[i];
        const double n2 = 1.0 + px * px + py * py;
        const double an = std::sqrt(n2);
        G.E33.a[i] = n2 / G.J.a[i];
        G.absN.a[i] = an;
        const double n1 = -px / an, n2c = -py / an, n3 = 1.0 / an;
        G.n.c[0].a[i] = n1;
        G.n.c[1].a[i] = n2c;
        G.n.c[2].a[i] = n3;
        G.Pi.c[0].a[i] = 1.0 - n1 * n1;
        G.Pi.c[1].a[i] = -n1 * n2c;
        G.Pi.c[2].a[i] = -n1 * n3;
        G.Pi.c[3].a[i] = 1.0 - n2c * n2c;
        G.Pi.c[4].a[i] = -n2c * n3;
        G.Pi.c[5].a[i] = 1.0 - n3 * n3;
    }
    G.H = mean_curvature(h);
    return G;
}

VectorField apply_E(const GeometryBundle& G, const VectorField& w) {
    VectorField out(G.grid);
    for (std::size_t i = 0; i < G.J.a.size(); ++i) {
        const double px = G.px.a[i], py = G.py.a[i], J = G.J.a[i];
        const double w1 = w.c[0].a[i], w2 = w.c[1].a[i], w3 = w.c[2].a[i];
        out.c[0].a[i] = J * w1 - px * w3;
        out.c[1].a[i] = J * w2 - py * w3;
        out.c[2].a[i] = -px * w1 - py * w2 + G.E33.a[i] * w3;
    }
    return out;
}

VolumeField dot_N(const GeometryBundle& G, const VectorField& v) {
    VolumeField out(G.grid);
    for (std::size_t i = 0; i < out.a.size(); ++i)
        out.a[i] = -G.px.a[i] * v.c[0].a[i] - G.py.a[i] * v.c[1].a[i] + v.c[2].a[i];
    return out;
}

VectorField apply_P(const GeometryBundle& G, const VectorField& v) {
    VectorField out(G.grid);
    for (std::size_t i = 0; i < G.J.a.size(); ++i) {
        out.c[0].a[i] = G.J.a[i] * v.c[0].a[i];
        out.c[1].a[i] = G.J.a[i] * v.c[1].a[i];
        out.c[2].a[i] = -G.px.a[i] * v.c[0].a[i] - G.py.a[i] * v.c[1].a[i] + v.c[2].a[i];
    }
    return out;
}

GeodesicChart geodesic_chart(const SurfaceField& h, double delta, int nlev) {
    if (nlev < 2) throw Error(ErrorCode::ConfigError, "geodesic_chart: nlev >= 2");
    const GridPtr grid = h.grid;
    SurfaceField hx = horizontal_derivative(h, 1);
    SurfaceField hy = horizontal_derivative(h, 2);
    SurfaceField n1(grid), n2(grid), n3(grid);
    for (std::size_t i = 0; i < h.a.size(); ++i) {
        const double an = std::sqrt(1.0 + hx.a[i] * hx.a[i] + hy.a[i] * hy.a[i]);
        n1.a[i] = -hx.a[i] / an;
        n2.a[i] = -hy.a[i] / an;
        n3.a[i] = 1.0 / an;
    }
    // derivatives of n by the pointwise quotient rule on exact derivatives of
    // N = (-d1 h, -d2 h, 1); avoids differentiating the nodal quotient
    SurfaceField hxx = horizontal_derivative(hx, 1);
    SurfaceField hxy = horizontal_derivative(hx, 2);
    SurfaceField hyy = horizontal_derivative(hy, 2);
    SurfaceField dn[3][2];
    for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 2; ++d) dn[c][d] = SurfaceField(grid);
    for (std::size_t i = 0; i < h.a.size(); ++i) {
        const double N[3] = {-hx.a[i], -hy.a[i], 1.0};
        const double an2 = N[0] * N[0] + N[1] * N[1] + 1.0;
        const double an = std::sqrt(an2);
        const double dN[2][3] = {{-hxx.a[i], -hxy.a[i], 0.0}, {-hxy.a[i], -hyy.a[i], 0.0}};
        for (int d = 0; d < 2; ++d) {
            const double NdN = N[0] * dN[d][0] + N[1] * dN[d][1];
            for (int c = 0; c < 3; ++c)
                dn[c][d].a[i] = dN[d][c] / an - N[c] * NdN / (an2 * an);
        }
    }

    GeodesicChart chart;
    double det_ref_sign = 0.0;
    for (int m = 0; m < nlev; ++m) {
        const double zc = -delta * (1.0 - double(m) / (nlev - 1));
        chart.zlev.push_back(zc);
        SurfaceField t1[3], t2[3], t3[3], psi[3];
        for (int c = 0; c < 3; ++c) {
            t1[c] = SurfaceField(grid);
            t2[c] = SurfaceField(grid);
            t3[c] = SurfaceField(grid);
            psi[c] = SurfaceField(grid);
        }
        const Grid& g = *grid;
        for (int i1 = 0; i1 < g.ny; ++i1) {
            for (int i2 = 0; i2 < g.ny; ++i2) {
                const std::size_t i = g.sidx(i1, i2);
                psi[0].a[i] = g.y[i1] + zc * n1.a[i];
                psi[1].a[i] = g.y[i2] + zc * n2.a[i];
                psi[2].a[i] = h.a[i] + zc * n3.a[i];
                t1[0].a[i] = 1.0 + zc * dn[0][0].a[i];
                t1[1].a[i] = zc * dn[1][0].a[i];
                t1[2].a[i] = hx.a[i] + zc * dn[2][0].a[i];
                t2[0].a[i] = zc * dn[0][1].a[i];
                t2[1].a[i] = 1.0 + zc * dn[1][1].a[i];
                t2[2].a[i] = hy.a[i] + zc * dn[2][1].a[i];
                t3[0].a[i] = n1.a[i];
                t3[1].a[i] = n2.a[i];
                t3[2].a[i] = n3.a[i];
            }
        }
        auto dot = [&](SurfaceField* u, SurfaceField* w) {
            SurfaceField out(grid);
            for (std::size_t i = 0; i < out.a.size(); ++i)
                out.a[i] = u[0].a[i] * w[0].a[i] + u[1].a[i] * w[1].a[i] + u[2].a[i] * w[2].a[i];
            return out;
        };
        chart.g11.push_back(dot(t1, t1));
        chart.g12.push_back(dot(t1, t2));
        chart.g22.push_back(dot(t2, t2));
        chart.g13.push_back(dot(t1, t3));
        chart.g23.push_back(dot(t2, t3));
        chart.g33.push_back(dot(t3, t3));
        SurfaceField det(grid);
        for (std::size_t i = 0; i < det.a.size(); ++i) {
            const double cx = t1[1].a[i] * t2[2].a[i] - t1[2].a[i] * t2[1].a[i];
            const double cy = t1[2].a[i] * t2[0].a[i] - t1[0].a[i] * t2[2].a[i];
            const double cz = t1[0].a[i] * t2[1].a[i] - t1[1].a[i] * t2[0].a[i];
            det.a[i] = cx * t3[0].a[i] + cy * t3[1].a[i] + cz * t3[2].a[i];
            if (det_ref_sign == 0.0 && det.a[i] != 0.0)
                det_ref_sign = det.a[i] > 0 ? 1.0 : -1.0;
            if (det.a[i] * det_ref_sign <= 0.0)
                throw Error(ErrorCode::ChartFolds,
                            "geodesic_chart: Jacobian changes sign inside the collar");
        }
        chart.detg.push_back(det);
        chart.psi.push_back({psi[0], psi[1], psi[2]});
        for (std::size_t i = 0; i < det.a.size(); ++i) {
            chart.max_offblock =
                std::max({chart.max_offblock, std::abs(chart.g13.back().a[i]),
                          std::abs(chart.g23.back().a[i]), std::abs(chart.g33.back().a[i] - 1.0)});
        }
    }
    return chart;
}

SurfaceField chart_w3(const SurfaceField& v1_top, const SurfaceField& v2_top,
                      const SurfaceField& v3_top, const SurfaceField& h,
                      const SurfaceField& dh_dt) {
    SurfaceField hx = horizontal_derivative(h, 1);
    SurfaceField hy = horizontal_derivative(h, 2);
    SurfaceField out(h.grid);
    for (std::size_t i = 0; i < out.a.size(); ++i) {
        const double an = std::sqrt(1.0 + hx.a[i] * hx.a[i] + hy.a[i] * hy.a[i]);
        out.a[i] = (-hx.a[i] * v1_top.a[i] - hy.a[i] * v2_top.a[i] + v3_top.a[i] - dh_dt.a[i]) / an;
    }
    return out;
}

} // namespace ffns
