#include "ffns/operators.hpp"

namespace ffns {

namespace {

// d_i f - g * dz f, dealiased; g is the geometric ratio for the direction
VolumeField slanted_derivative(const VolumeField& f, const VolumeField& fz,
                               const VolumeField& ratio, int axis) {
    VolumeField out = horizontal_derivative(f, axis);
    for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] -= ratio.a[i] * fz.a[i];
    dealias_inplace(out);
    return out;
}

} // namespace

VolumeField dphi(const VolumeField& f, const GeometryBundle& G, int i) {
    VolumeField fz = vertical_derivative(f);
    if (i == 1 || i == 2) {
        VolumeField ratio(G.grid);
        const VolumeField& p = (i == 1) ? G.px : G.py;
        for (std::size_t k = 0; k < ratio.a.size(); ++k) ratio.a[k] = p.a[k] / G.J.a[k];
        return slanted_derivative(f, fz, ratio, i);
    }
    // vertical flavour
    for (std::size_t k = 0; k < fz.a.size(); ++k) fz.a[k] /= G.J.a[k];
    dealias_inplace(fz);
    return fz;
}

VolumeField dphi_t(const VolumeField& f, const VolumeField& df_dt, const GeometryBundle& G) {
    VolumeField fz = vertical_derivative(f);
    VolumeField out(G.grid);
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = df_dt.a[k] - G.dt_phi.a[k] / G.J.a[k] * fz.a[k];
    dealias_inplace(out);
    return out;
}

VectorField grad_phi(const VolumeField& f, const GeometryBundle& G) {
    VectorField out(G.grid);
    VolumeField fz = vertical_derivative(f);
    VolumeField d1 = horizontal_derivative(f, 1);
    VolumeField d2 = horizontal_derivative(f, 2);
    for (std::size_t k = 0; k < fz.a.size(); ++k) {
        const double iJ = 1.0 / G.J.a[k];
        out.c[0].a[k] = d1.a[k] - G.px.a[k] * iJ * fz.a[k];
        out.c[1].a[k] = d2.a[k] - G.py.a[k] * iJ * fz.a[k];
        out.c[2].a[k] = fz.a[k] * iJ;
    }
    for (int c = 0; c < 3; ++c) dealias_inplace(out.c[c]);
    return out;
}

VolumeField div_phi(const VectorField& v, const GeometryBundle& G) {
    VectorField Pv = apply_P(G, v);
    VolumeField d = div_raw(Pv);
    for (std::size_t k = 0; k < d.a.size(); ++k) d.a[k] /= G.J.a[k];
    dealias_inplace(d);
    return d;
}

VolumeField lap_phi(const VolumeField& f, const GeometryBundle& G) {
    VectorField w = grad_raw(f);
    VectorField Ew = apply_E(G, w);
    VolumeField d = div_raw(Ew);
    for (std::size_t k = 0; k < d.a.size(); ++k) d.a[k] /= G.J.a[k];
    dealias_inplace(d);
    return d;
}

std::array<VectorField, 3> grad_phi_tensor(const VectorField& v, const GeometryBundle& G) {
    return {grad_phi(v.c[0], G), grad_phi(v.c[1], G), grad_phi(v.c[2], G)};
}

SymTensorField strain(const VectorField& v, const GeometryBundle& G) {
    // A[j] = grad^phi of component j; S_ij = (A_i(j) + A_j(i))/2
    std::array<VectorField, 3> A = grad_phi_tensor(v, G);
    SymTensorField S(G.grid);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            VolumeField& dst = S(i, j);
            const VolumeField& aij = A[std::size_t(j)].c[i];  // d^phi_i v_j
            const VolumeField& aji = A[std::size_t(i)].c[j];  // d^phi_j v_i
            for (std::size_t k = 0; k < dst.a.size(); ++k)
                dst.a[k] = 0.5 * (aij.a[k] + aji.a[k]);
        }
    }
    return S;
}

VectorField vorticity(const VectorField& v, const GeometryBundle& G) {
    VolumeField d2v3 = dphi(v.c[2], G, 2);
    VolumeField d1v3 = dphi(v.c[2], G, 1);
    VolumeField d1v2 = dphi(v.c[1], G, 1);
    VolumeField d2v1 = dphi(v.c[0], G, 2);
    VolumeField dzv1 = dphi(v.c[0], G, 3);
    VolumeField dzv2 = dphi(v.c[1], G, 3);
    VectorField w(G.grid);
    for (std::size_t k = 0; k < w.c[0].a.size(); ++k) {
        w.c[0].a[k] = d2v3.a[k] - dzv2.a[k];
        w.c[1].a[k] = dzv1.a[k] - d1v3.a[k];
        w.c[2].a[k] = d1v2.a[k] - d2v1.a[k];
    }
    return w;
}

VolumeField TransportSplit::advect(const VolumeField& f) const {
    VolumeField d1 = horizontal_derivative(f, 1);
    VolumeField d2 = horizontal_derivative(f, 2);
    VolumeField fz = vertical_derivative(f);
    VolumeField out(f.grid);
    for (std::size_t k = 0; k < out.a.size(); ++k)
        out.a[k] = v1.a[k] * d1.a[k] + v2.a[k] * d2.a[k] + Vz.a[k] * fz.a[k];
    dealias_inplace(out);
    return out;
}

VectorField TransportSplit::advect(const VectorField& f) const {
    VectorField out;
    for (int c = 0; c < 3; ++c) out.c[c] = advect(f.c[c]);
    return out;
}

TransportSplit transport_split(const VectorField& v, const GeometryBundle& G) {
    TransportSplit ts;
    ts.Vz = VolumeField(G.grid);
    for (std::size_t k = 0; k < ts.Vz.a.size(); ++k) {
        const double vdotN =
            -G.px.a[k] * v.c[0].a[k] - G.py.a[k] * v.c[1].a[k] + v.c[2].a[k];
        ts.Vz.a[k] = (vdotN - G.dt_phi.a[k]) / G.J.a[k];
    }
    dealias_inplace(ts.Vz);
    ts.v1 = v.c[0];
    ts.v2 = v.c[1];
    return ts;
}

VectorField grad_raw(const VolumeField& f) {
    VectorField out(f.grid);
    out.c[0] = horizontal_derivative(f, 1);
    out.c[1] = horizontal_derivative(f, 2);
    out.c[2] = vertical_derivative(f);
    return out;
}

VolumeField div_raw(const VectorField& w) {
    VolumeField out = horizontal_derivative(w.c[0], 1);
    VolumeField d2 = horizontal_derivative(w.c[1], 2);
    VolumeField dz = vertical_derivative(w.c[2]);
    for (std::size_t k = 0; k < out.a.size(); ++k) out.a[k] += d2.a[k] + dz.a[k];
    return out;
}

VectorField grad_phi_raw(const VolumeField& f, const GeometryBundle& G) {
    VectorField w = grad_raw(f);
    VectorField out(G.grid);
    for (std::size_t k = 0; k < out.c[0].a.size(); ++k) {
        const double iJ = 1.0 / G.J.a[k];
        out.c[0].a[k] = w.c[0].a[k] - G.px.a[k] * iJ * w.c[2].a[k];
        out.c[1].a[k] = w.c[1].a[k] - G.py.a[k] * iJ * w.c[2].a[k];
        out.c[2].a[k] = w.c[2].a[k] * iJ;
    }
    return out;
}

} // namespace ffns
