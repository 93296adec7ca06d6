#include "ffns/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace ffns {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

void put_array(std::ostream& os, const std::vector<double>& a) {
    for (double v : a) put_f64(os, v);
}

void get_array(std::istream& is, std::vector<double>& a) {
    for (double& v : a) v = get_f64(is);
}

} // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    const Grid& g = *snap.h.grid;
    os.write("FFNS", 4);
    put_u32(os, 1u);
    put_u32(os, std::uint32_t(g.ny));
    put_u32(os, std::uint32_t(g.nz));
    put_f64(os, g.L);
    put_f64(os, g.b);
    put_f64(os, snap.t);
    for (int i = 0; i < 3; ++i) put_array(os, snap.v.c[i].a);
    put_array(os, snap.h.a);
    put_array(os, snap.q.a);
    if (!os) throw Error(ErrorCode::IoError, "short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::IoError, "cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "FFNS", 4) != 0)
        throw Error(ErrorCode::IoError, path + ": bad magic");
    std::uint32_t version = get_u32(is);
    if (version != 1u) throw Error(ErrorCode::IoError, path + ": unsupported version");
    int ny = int(get_u32(is));
    int nz = int(get_u32(is));
    double L = get_f64(is);
    double b = get_f64(is);
    double t = get_f64(is);
    auto grid = make_grid(L, ny, nz, b);
    Snapshot snap;
    snap.t = t;
    snap.v = VectorField(grid);
    snap.h = SurfaceField(grid);
    snap.q = VolumeField(grid);
    for (int i = 0; i < 3; ++i) get_array(is, snap.v.c[i].a);
    get_array(is, snap.h.a);
    get_array(is, snap.q.a);
    if (!is) throw Error(ErrorCode::IoError, path + ": truncated file");
    return snap;
}

void write_csv_slice(const std::string& path, const VolumeField& f, const std::string& axis,
                     int index) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    const Grid& g = *f.grid;
    os.precision(17);
    if (axis == "z") {
        if (index < 0 || index >= g.nz) throw Error(ErrorCode::IoError, "slice index out of range");
        os << "y1,y2,value\n";
        for (int i1 = 0; i1 < g.ny; ++i1)
            for (int i2 = 0; i2 < g.ny; ++i2)
                os << g.y[i1] << ',' << g.y[i2] << ',' << f(index, i1, i2) << '\n';
    } else if (axis == "y2") {
        if (index < 0 || index >= g.ny) throw Error(ErrorCode::IoError, "slice index out of range");
        os << "y1,z,value\n";
        for (int j = 0; j < g.nz; ++j)
            for (int i1 = 0; i1 < g.ny; ++i1)
                os << g.y[i1] << ',' << g.z[j] << ',' << f(j, i1, index) << '\n';
    } else {
        throw Error(ErrorCode::IoError, "slice axis must be 'z' or 'y2'");
    }
}

void write_csv(const std::string& path, const SurfaceField& f) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    const Grid& g = *f.grid;
    os.precision(17);
    os << "y1,y2,value\n";
    for (int i1 = 0; i1 < g.ny; ++i1)
        for (int i2 = 0; i2 < g.ny; ++i2)
            os << g.y[i1] << ',' << g.y[i2] << ',' << f(i1, i2) << '\n';
}

} // namespace ffns
