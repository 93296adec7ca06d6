#pragma once

#include <string>
#include <vector>

#include "ffns/field.hpp"

namespace ffns {

/// One stored simulation state. Binary layout: header {magic "FFNS",
/// version u32, N_y u32, N_z u32, L f64, b f64, t f64} followed by the
/// fields v1, v2, v3, h, q as row-major little-endian f64.
struct Snapshot {
    double t = 0.0;
    VectorField v;
    SurfaceField h;
    VolumeField q;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

/// Horizontal slice (fixed z index) or vertical slice (fixed y2 index) of a
/// volume field as CSV; axis is "z" or "y2".
void write_csv_slice(const std::string& path, const VolumeField& f, const std::string& axis,
                     int index);
void write_csv(const std::string& path, const SurfaceField& f);

} // namespace ffns
