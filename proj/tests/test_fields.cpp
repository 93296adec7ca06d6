#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "ffns/field.hpp"
#include "ffns/history.hpp"
#include "ffns/snapshot.hpp"
#include "helpers.hpp"

using namespace ffns;
using namespace ffns::testing;

namespace {
const double TWO_PI = 2.0 * M_PI;

// centered 4th-order difference along y1 on the periodic grid, the
// independent oracle for spectral differentiation of non-band-limited fields
VolumeField fd4_dy1(const VolumeField& f) {
    const Grid& g = *f.grid;
    const double h = g.L / g.ny;
    VolumeField out(f.grid);
    for (int j = 0; j < g.nz; ++j)
        for (int i1 = 0; i1 < g.ny; ++i1)
            for (int i2 = 0; i2 < g.ny; ++i2) {
                auto at = [&](int s) { return f(j, ((i1 + s) % g.ny + g.ny) % g.ny, i2); };
                out(j, i1, i2) = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
            }
    return out;
}
} // namespace

TEST_CASE("grid nodes include both endpoints exactly") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    CHECK(g->z.front() == -1.0);
    CHECK(g->z.back() == 0.0);
    CHECK(g->ny == 16);
    // quadrature integrates 1 to the depth
    double s = 0.0;
    for (double w : g->zw) s += w;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(make_grid(TWO_PI, 6, 17, 1.0), Error);
    CHECK_THROWS_AS(make_grid(TWO_PI, 15, 17, 1.0), Error);
    CHECK_THROWS_AS(make_grid(TWO_PI, 16, 4, 1.0), Error);
}

TEST_CASE("nodal-spectral roundtrip is tight") {
    auto g = make_grid(TWO_PI, 32, 17, 1.0);
    VolumeField f = random_volume(g, 7u, 9, 1.0);
    VolumeField back = volume_from_spectral(g, to_spectral(f));
    CHECK(linf_diff(f, back) <= 1e-12 * std::max(1.0, max_abs(f)));
}

TEST_CASE("horizontal derivative: constant, single mode, smooth oracle") {
    auto g = make_grid(TWO_PI, 32, 17, 1.0);
    VolumeField one = volume_of(g, [](double, double, double) { return 1.0; });
    CHECK(max_abs(horizontal_derivative(one, 1)) <= 1e-14);

    VolumeField s = volume_of(g, [&](double y1, double, double) { return std::sin(y1); });
    VolumeField c = volume_of(g, [&](double y1, double, double) { return std::cos(y1); });
    CHECK(linf_diff(horizontal_derivative(s, 1), c) <= 1e-12);

    VolumeField e = volume_of(g, [&](double y1, double, double) { return std::exp(std::sin(y1)); });
    VolumeField de = horizontal_derivative(e, 1);
    VolumeField de_fd = fd4_dy1(e);
    const double h = g->L / g->ny;
    CHECK(linf_diff(de, de_fd) <= 50.0 * h * h * h * h);
}

TEST_CASE("horizontal derivatives commute across axes") {
    auto g = make_grid(TWO_PI, 32, 17, 1.0);
    VolumeField f = random_volume(g, 3u, 9, 1.0);
    VolumeField a = horizontal_derivative(horizontal_derivative(f, 1), 2);
    VolumeField b = horizontal_derivative(horizontal_derivative(f, 2), 1);
    CHECK(linf_diff(a, b) <= 1e-12 * std::max(1.0, max_abs(a)));
}

TEST_CASE("vertical derivative: exact on polynomials, spectral on cos") {
    auto g = make_grid(TWO_PI, 8, 17, 1.0);
    const double b = g->b;
    VolumeField lin = volume_of(g, [](double, double, double z) { return z; });
    VolumeField one = volume_of(g, [](double, double, double) { return 1.0; });
    CHECK(linf_diff(vertical_derivative(lin), one) <= 1e-13);

    VolumeField quad = volume_of(g, [&](double, double, double z) { return z * (z + b); });
    VolumeField dquad = volume_of(g, [&](double, double, double z) { return 2 * z + b; });
    CHECK(linf_diff(vertical_derivative(quad), dquad) <= 1e-12);

    auto err_at = [&](int nz) {
        auto gg = make_grid(TWO_PI, 8, nz, 1.0);
        VolumeField f = volume_of(gg, [](double, double, double z) { return std::cos(z); });
        VolumeField want = volume_of(gg, [](double, double, double z) { return -std::sin(z); });
        return linf_diff(vertical_derivative(f), want);
    };
    const double e9 = err_at(9), e17 = err_at(17);
    CHECK(e17 < 1e-10);
    CHECK(e17 < e9 * 1e-2);  // spectral, not algebraic, decay
}

TEST_CASE("conormal derivative") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    const double b = g->b;
    VolumeField one = volume_of(g, [](double, double, double) { return 1.0; });
    for (int idx : {1, 2, 3}) CHECK(max_abs(conormal_derivative(one, idx)) <= 1e-13);

    VolumeField lin = volume_of(g, [](double, double, double z) { return z; });
    VolumeField want = volume_of(g, [&](double, double, double z) { return z * (z + b); });
    CHECK(linf_diff(conormal_derivative(lin, 3), want) <= 1e-12);

    // weight vanishes on both boundary planes for any smooth field
    VolumeField f = random_volume(g, 11u, 5, 1.0);
    VolumeField z3 = conormal_derivative(f, 3);
    for (int i1 = 0; i1 < g->ny; ++i1)
        for (int i2 = 0; i2 < g->ny; ++i2) {
            CHECK(z3(0, i1, i2) == 0.0);
            CHECK(z3(g->nz - 1, i1, i2) == 0.0);
        }
}

TEST_CASE("dealiased product equals exact band projection on two-mode input") {
    auto g = make_grid(TWO_PI, 32, 9, 1.0);
    // k=9 and k=4: product has modes 5 and 13; band keeps |k|<=10 so the
    // projected exact product keeps only the k=5 line
    SurfaceField f = surface_of(g, [](double y1, double) { return std::cos(9.0 * y1); });
    SurfaceField h = surface_of(g, [](double y1, double) { return std::cos(4.0 * y1); });
    SurfaceField got = multiply_dealias(f, h);
    SurfaceField want = surface_of(g, [](double y1, double) { return 0.5 * std::cos(5.0 * y1); });
    CHECK(linf_diff(got, want) <= 1e-13);
}

TEST_CASE("lambda multiplier matches hand value on a single mode") {
    auto g = make_grid(TWO_PI, 16, 9, 1.0);
    SurfaceField f = surface_of(g, [](double y1, double) { return std::cos(2.0 * y1); });
    SurfaceField lf = lambda_s(f, 0.5);
    const double factor = std::pow(1.0 + 4.0, 0.25);
    SurfaceField want = surface_of(g, [&](double y1, double) { return factor * std::cos(2.0 * y1); });
    CHECK(linf_diff(lf, want) <= 1e-12);
}

TEST_CASE("time derivative from history") {
    auto g = make_grid(TWO_PI, 8, 9, 1.0);
    const double dt = 0.05;

    SUBCASE("constant field, ell=1 -> 0; linear ramp reproduced exactly") {
        HistoryRing<VolumeField> ring(6);
        for (int k = 0; k < 4; ++k) {
            VolumeField f(g);
            for (double& v : f.a) v = k * dt;  // f(t) = t
            ring.push(k * dt, f);
        }
        VolumeField d1 = time_derivative_from_history(ring, 1);
        for (double v : d1.a) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

        HistoryRing<VolumeField> flat(6);
        for (int k = 0; k < 4; ++k) {
            VolumeField f(g);
            for (double& v : f.a) v = 3.25;
            flat.push(k * dt, f);
        }
        CHECK(max_abs(time_derivative_from_history(flat, 1)) <= 1e-12);
    }

    SUBCASE("sin(t), ell=2 at t=1 converges at second order") {
        auto err_for = [&](double step) {
            HistoryRing<VolumeField> ring(8);
            for (int k = 5; k >= 0; --k) {
                VolumeField f(g);
                for (double& v : f.a) v = std::sin(1.0 - k * step);
                ring.push(1.0 - k * step, f);
            }
            VolumeField d2 = time_derivative_from_history(ring, 2);
            return std::abs(d2.a[0] + std::sin(1.0));
        };
        const double e1 = err_for(0.02), e2 = err_for(0.01);
        CHECK(e1 / e2 > 3.0);  // order ~2
        CHECK(e2 < 3e-4);
    }

    SUBCASE("insufficient history throws") {
        HistoryRing<VolumeField> ring(8);
        ring.push(0.0, VolumeField(g));
        ring.push(dt, VolumeField(g));
        CHECK_THROWS_AS(time_derivative_from_history(ring, 2), Error);
    }
}

TEST_CASE("snapshot binary roundtrip and csv export") {
    auto g = make_grid(TWO_PI, 16, 9, 1.0);
    Snapshot s;
    s.t = 0.75;
    s.v = random_vector(g, 5u, 4, 0.3);
    s.h = random_surface(g, 6u, 4, 0.05);
    s.q = random_volume(g, 7u, 4, 0.2);

    auto dir = std::filesystem::temp_directory_path() / "ffns_test_snap";
    std::filesystem::create_directories(dir);
    auto path = (dir / "snap.ffns").string();
    write_snapshot(path, s);
    Snapshot r = read_snapshot(path);
    CHECK(r.t == s.t);
    CHECK(r.h.grid->ny == 16);
    CHECK(linf_diff(r.h, s.h) == 0.0);
    for (int c = 0; c < 3; ++c) CHECK(linf_diff(r.v.c[c], s.v.c[c]) == 0.0);
    CHECK(linf_diff(r.q, s.q) == 0.0);

    write_csv_slice((dir / "slice.csv").string(), s.q, "z", 0);
    write_csv((dir / "h.csv").string(), s.h);
    CHECK(std::filesystem::file_size(dir / "slice.csv") > 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("norm homogeneity and simple integrals") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    VolumeField one = volume_of(g, [](double, double, double) { return 1.0; });
    CHECK(l2_norm(one) == doctest::Approx(TWO_PI).epsilon(1e-12));
    VolumeField f = random_volume(g, 21u, 5, 1.0);
    CHECK(l2_norm(3.0 * f) == doctest::Approx(3.0 * l2_norm(f)).epsilon(1e-12));
}
