#pragma once

#include "ffns/geometry.hpp"

namespace ffns {

/// d^phi_i f = d_i f - (d_i phi / dz phi) dz f for i = 1,2,
/// d^phi_z f = dz f / dz phi. Products with geometry are dealiased.
VolumeField dphi(const VolumeField& f, const GeometryBundle& G, int i);
/// Time flavour; the caller supplies df/dt.
VolumeField dphi_t(const VolumeField& f, const VolumeField& df_dt, const GeometryBundle& G);

/// grad^phi f = (1/dz phi) P^t grad f, componentwise equal to dphi.
VectorField grad_phi(const VolumeField& f, const GeometryBundle& G);
/// div^phi v = (1/dz phi) div(P v); the P-matrix route is canonical.
VolumeField div_phi(const VectorField& v, const GeometryBundle& G);
/// lap^phi f = (1/dz phi) div(E grad f); the E-matrix route is canonical.
VolumeField lap_phi(const VolumeField& f, const GeometryBundle& G);

/// S^phi v = (grad^phi v + (grad^phi v)^t)/2, exactly symmetric storage.
SymTensorField strain(const VectorField& v, const GeometryBundle& G);
/// omega = curl^phi v, componentwise from dphi.
VectorField vorticity(const VectorField& v, const GeometryBundle& G);

/// Full (non-symmetrized) gradient A(i,j) = d^phi_i v_j.
std::array<VectorField, 3> grad_phi_tensor(const VectorField& v, const GeometryBundle& G);

/// dt^phi + v . grad^phi = dt + v_y . grad_y + V_z dz with
/// V_z = (v.N - dt eta)/dz phi.
struct TransportSplit {
    VolumeField Vz;
    VolumeField v1, v2;  // horizontal advecting velocity

    VolumeField advect(const VolumeField& f) const;
    VectorField advect(const VectorField& f) const;
};

TransportSplit transport_split(const VectorField& v, const GeometryBundle& G);

// raw (non-dealiased) building blocks shared with the pressure solver
VectorField grad_raw(const VolumeField& f);
VolumeField div_raw(const VectorField& w);
/// (1/J) P^t grad f evaluated pointwise with no truncation.
VectorField grad_phi_raw(const VolumeField& f, const GeometryBundle& G);

} // namespace ffns
