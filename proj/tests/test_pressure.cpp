#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ffns/pressure.hpp"
#include "helpers.hpp"

using namespace ffns;
using namespace ffns::testing;

namespace {
const double TWO_PI = 2.0 * M_PI;

GeometryBundle wave_geometry(const GridPtr& g, double amp) {
    SurfaceField h = surface_of(g, [&](double y1, double) { return amp * std::cos(y1); });
    SurfaceField dh(g);
    auto ca = choose_A(h, g->b, 1.0);
    return build_geometry(h, dh, ca.A, 0.3);
}

// independent 1-D oracle: second-order finite-difference two-point BVP
// -q'' + kk q = p(z), q(0)=0, q'(-b)=0 on a fine uniform grid
std::vector<double> bvp_oracle(double b, double kk, const std::function<double(double)>& p,
                               int n, std::vector<double>& zs) {
    const double h = b / n;
    std::vector<double> lo(n + 1, 0), di(n + 1, 0), up(n + 1, 0), rhs(n + 1, 0);
    zs.resize(n + 1);
    for (int i = 0; i <= n; ++i) zs[i] = -b + i * h;
    for (int i = 1; i < n; ++i) {
        lo[i] = -1.0 / (h * h);
        up[i] = -1.0 / (h * h);
        di[i] = 2.0 / (h * h) + kk;
        rhs[i] = p(zs[i]);
    }
    // one-sided second-order Neumann (-3q0 + 4q1 - q2)/(2h) = 0; eliminate
    // the q2 entry with row 1 to stay tridiagonal
    const double f = -1.0 / up[1];
    di[0] = -3.0 - f * lo[1];
    up[0] = 4.0 - f * di[1];
    rhs[0] = -f * rhs[1];
    di[n] = 1.0;
    up[n] = 0.0;
    rhs[n] = 0.0;
    // Thomas sweep
    for (int i = 1; i <= n; ++i) {
        const double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> q(n + 1);
    q[n] = rhs[n] / di[n];
    for (int i = n - 1; i >= 0; --i) q[i] = (rhs[i] - up[i] * q[i + 1]) / di[i];
    return q;
}
} // namespace

TEST_CASE("homogeneous Dirichlet problem has the zero solution") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    GeometryBundle G = wave_geometry(g, 0.1);
    PressureSolver solver(g);
    PressureProblem prob;
    prob.F = VolumeField(g);
    prob.G1 = SurfaceField(g);
    prob.G3 = SurfaceField(g);
    auto r = solver.solve(prob, G);
    CHECK(r.converged);
    CHECK(max_abs(r.q) == 0.0);
    CHECK(r.iterations == 0);
}

TEST_CASE("manufactured q* = phi: exact analytic data, curved geometry") {
    // E grad(phi) = e3, so F = 0, G1 = h, G3 = 1; the solution is phi itself
    auto g = make_grid(TWO_PI, 32, 33, 1.0);
    GeometryBundle G = wave_geometry(g, 0.15);
    PressureSolver solver(g);
    PressureProblem prob;
    prob.F = VolumeField(g);
    prob.G1 = G.h;
    prob.G3 = surface_of(g, [](double, double) { return 1.0; });
    prob.tol = 1e-11;
    auto r = solver.solve(prob, G);
    CHECK(r.converged);
    CHECK(linf_diff(r.q, G.phi) <= 1e-7);
}

TEST_CASE("manufactured q* = phi^2: recovery decays under refinement") {
    auto err_at = [&](int ny, PressureVariant variant, int* iters = nullptr) {
        auto g = make_grid(TWO_PI, ny, 33, 1.0);
        // mode 6 is unresolved after the 2/3 rule at ny=16 and resolved at 32,
        // so the recovery error is discretization-dominated on the coarse grid
        SurfaceField h = surface_of(g, [](double y1, double y2) {
            return 0.18 * std::cos(y1) + 0.05 * std::cos(6 * y1 + 0.7) + 0.03 * std::sin(5 * y2);
        });
        SurfaceField dh(g);
        auto ca = choose_A(h, g->b, 1.0);
        GeometryBundle G = build_geometry(h, dh, ca.A, 0.3);
        PressureSolver solver(g);
        PressureProblem prob;
        prob.variant = variant;
        prob.tol = 1e-11;
        // E grad(phi^2) = 2 phi e3: F = -2 J, G1 = h^2, G2 = 2h, G3 = -2b
        prob.F = -2.0 * G.J;
        prob.G1 = G.h * G.h;
        prob.G2 = 2.0 * G.h;
        prob.G3 = surface_of(g, [&](double, double) { return -2.0 * g->b; });
        auto r = solver.solve(prob, G);
        REQUIRE(r.converged);
        if (iters) *iters = r.iterations;
        VolumeField want = G.phi * G.phi;
        if (variant == PressureVariant::NeumannTop) {
            const double shift = mean(want) - mean(r.q);
            for (double& v : r.q.a) v += shift;
        }
        return linf_diff(r.q, want);
    };

    SUBCASE("DirichletTop") {
        const double e16 = err_at(16, PressureVariant::DirichletTop);
        const double e32 = err_at(32, PressureVariant::DirichletTop);
        CHECK(e32 <= e16 / 4.0);
        CHECK(e32 <= 1e-5);
    }
    SUBCASE("NeumannTop with zero-mean gauge") {
        const double e16 = err_at(16, PressureVariant::NeumannTop);
        const double e32 = err_at(32, PressureVariant::NeumannTop);
        CHECK(e32 <= e16 / 4.0);
        CHECK(e32 <= 1e-4);
    }
    SUBCASE("two variants agree after gauge alignment") {
        auto g = make_grid(TWO_PI, 32, 33, 1.0);
        GeometryBundle G = wave_geometry(g, 0.25);
        PressureSolver solver(g);
        PressureProblem prob;
        prob.tol = 1e-11;
        prob.F = -2.0 * G.J;
        prob.G1 = G.h * G.h;
        prob.G2 = 2.0 * G.h;
        prob.G3 = surface_of(g, [&](double, double) { return -2.0 * g->b; });
        prob.variant = PressureVariant::DirichletTop;
        auto rd = solver.solve(prob, G);
        prob.variant = PressureVariant::NeumannTop;
        auto rn = solver.solve(prob, G);
        REQUIRE(rd.converged);
        REQUIRE(rn.converged);
        const double shift = mean(rd.q) - mean(rn.q);
        for (double& v : rn.q.a) v += shift;
        CHECK(linf_diff(rd.q, rn.q) <= 2e-4);
    }
}

TEST_CASE("flat single-mode solve matches the 1-D finite-difference oracle") {
    auto g = make_grid(TWO_PI, 16, 33, 1.0);
    SurfaceField zero(g);
    GeometryBundle G = build_geometry(zero, zero, 0.5, 0.5);
    PressureSolver solver(g);
    PressureProblem prob;
    prob.tol = 1e-11;
    auto pz = [](double z) { return std::exp(z); };
    prob.F = volume_of(g, [&](double y1, double, double z) { return std::cos(y1) * pz(z); });
    prob.G1 = SurfaceField(g);
    prob.G3 = SurfaceField(g);
    auto r = solver.solve(prob, G);
    REQUIRE(r.converged);

    std::vector<double> zs;
    auto q1d = bvp_oracle(g->b, 1.0, pz, 4000, zs);
    // compare the cos(y1) profile at y=0 against linear interpolation of the oracle
    double worst = 0.0;
    for (int j = 0; j < g->nz; ++j) {
        const double z = g->z[j];
        const double t = (z + g->b) / (g->b / 4000.0);
        const int i0 = std::min(int(t), 3999);
        const double w = t - i0;
        const double oracle = (1 - w) * q1d[i0] + w * q1d[i0 + 1];
        worst = std::max(worst, std::abs(r.q(j, 0, 0) - oracle));
    }
    CHECK(worst <= 5e-5);
}

TEST_CASE("projection") {
    auto g = make_grid(TWO_PI, 32, 33, 1.0);

    SUBCASE("already divergence-free field is unchanged up to tolerance") {
        SurfaceField zero(g);
        GeometryBundle G = build_geometry(zero, zero, 0.5, 0.5);
        PressureSolver solver(g);
        // curl of a potential is exactly divergence free discretely
        VolumeField psi = volume_of(g, [&](double y1, double y2, double z) {
            return std::sin(y1 + y2) * z * z * (z + g->b);
        });
        VectorField v(g);
        VolumeField psz = vertical_derivative(psi);
        VolumeField ps1 = horizontal_derivative(psi, 1);
        for (std::size_t i = 0; i < v.c[0].a.size(); ++i) {
            v.c[0].a[i] = -psz.a[i];
            v.c[2].a[i] = ps1.a[i];
        }
        auto pr = solver.project(v, G, 1.0, 1e-11, 400);
        CHECK(max_abs(div_phi(pr.v, G)) <= 1e-8);
        double worst = 0.0;
        for (int c = 0; c < 3; ++c) worst = std::max(worst, linf_diff(pr.v.c[c], v.c[c]));
        CHECK(worst <= 1e-7);
        CHECK(max_abs(pr.q) <= 1e-6);
    }

    SUBCASE("random smooth velocity: residual divergence below 1e-8, bottom preserved") {
        GeometryBundle G = wave_geometry(g, 0.12);
        PressureSolver solver(g);
        VectorField v = random_vector(g, 44u, 6, 0.4);
        // impermeable bottom to start with
        SurfaceField vb(g);
        set_bottom(v.c[2], vb);
        auto pr = solver.project(v, G, 1.0, 1e-11, 400);
        CHECK(max_abs(div_phi(pr.v, G)) <= 1e-8);
        CHECK(max_abs(trace_bottom(pr.v.c[2])) <= 1e-8);
        // projecting again is a no-op
        auto pr2 = solver.project(pr.v, G, 1.0, 1e-11, 400);
        double worst = 0.0;
        for (int c = 0; c < 3; ++c) worst = std::max(worst, linf_diff(pr2.v.c[c], pr.v.c[c]));
        CHECK(worst <= 1e-7);
    }

    SUBCASE("flat gradient field projects to a small remainder") {
        SurfaceField zero(g);
        GeometryBundle G = build_geometry(zero, zero, 0.5, 0.5);
        PressureSolver solver(g);
        VolumeField chi = volume_of(g, [](double y1, double, double z) {
            return std::cos(y1) * std::cos(z);
        });
        VectorField v = grad_raw(chi);
        auto pr = solver.project(v, G, 1.0, 1e-11, 400);
        CHECK(max_abs(div_phi(pr.v, G)) <= 1e-8);
        // the part removed is the non-harmonic bulk; what remains satisfies
        // the same boundary data, so it is much smaller than v itself
        CHECK(l2_norm(pr.v) <= 0.8 * l2_norm(v));
    }
}

TEST_CASE("assemble_rhs") {
    auto g = make_grid(TWO_PI, 32, 17, 1.0);

    SUBCASE("rest state gives all zero data") {
        SurfaceField zero(g);
        GeometryBundle G = build_geometry(zero, zero, 0.5, 0.5);
        VectorField v(g);
        VectorField dvdt(g);
        auto prob = assemble_rhs(v, G, 1e-2, 0.1, 1.0, PressureVariant::NeumannTop, &dvdt);
        CHECK(max_abs(prob.F) == 0.0);
        CHECK(max_abs(prob.G1) == 0.0);
        CHECK(max_abs(prob.G2) == 0.0);
        CHECK(max_abs(prob.G3) == 0.0);
    }

    SUBCASE("tiny wave linearization: G1 ~ (g + sigma) h") {
        const double a = 1e-6, sigma = 0.3, grav = 1.2;
        SurfaceField h = surface_of(g, [&](double y1, double) { return a * std::cos(y1); });
        SurfaceField dh(g);
        GeometryBundle G = build_geometry(h, dh, 0.5, 0.5);
        VectorField v(g);
        auto prob = assemble_rhs(v, G, 1e-2, sigma, grav, PressureVariant::DirichletTop);
        SurfaceField want = (grav + sigma) * h;
        CHECK(linf_diff(prob.G1, want) <= 1e-6 * a * (grav + sigma));
    }

    SUBCASE("manufactured (v, eta): F matches the closed-form expression") {
        const double a = 0.05;
        SurfaceField h = surface_of(g, [&](double y1, double) { return a * std::cos(y1); });
        SurfaceField dh(g);
        const double A = 0.5;
        GeometryBundle G = build_geometry(h, dh, A, 0.3);
        const double b = g->b;
        VectorField v(g);
        v.c[0] = volume_of(g, [&](double, double, double z) { return 0.3 * z * z * (z + b); });
        v.c[2] = volume_of(g, [&](double, double, double z) { return z * (z + b); });
        auto prob = assemble_rhs(v, G, 0.0, 0.0, 1.0, PressureVariant::DirichletTop);
        // F = (px u' - w')^2 / J for v = (u(z), 0, w(z)) and y2-independent eta
        VolumeField want = volume_of(g, [&](double y1, double, double z) {
            const double px = -a * (1 + z / b) * std::exp(A * z) * std::sin(y1);
            const double J =
                1.0 + a * std::exp(A * z) * (1.0 / b + (1 + z / b) * A) * std::cos(y1);
            const double up = 0.3 * (2 * z * (z + b) + z * z);
            const double wp = 2 * z + b;
            const double d = px * up - wp;
            return d * d / J;
        });
        dealias_inplace(want);
        CHECK(linf_diff(prob.F, want) <= 1e-8);
    }

    SUBCASE("NeumannTop without time derivative data throws") {
        SurfaceField zero(g);
        GeometryBundle G = build_geometry(zero, zero, 0.5, 0.5);
        VectorField v(g);
        CHECK_THROWS_AS(assemble_rhs(v, G, 1e-2, 0.1, 1.0, PressureVariant::NeumannTop), Error);
    }
}

TEST_CASE("bilinear form: symmetry and positivity probes") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    GeometryBundle G = wave_geometry(g, 0.15);
    PressureSolver solver(g);
    for (unsigned s = 0; s < 5; ++s) {
        VolumeField f = random_volume(g, 100u + s, 4, 1.0);
        VolumeField h = random_volume(g, 200u + s, 4, 1.0);
        const double fh = solver.bilinear(G, f, h);
        const double hf = solver.bilinear(G, h, f);
        CHECK(fh == doctest::Approx(hf).epsilon(1e-10));
        const double ff = solver.bilinear(G, f, f);
        CHECK(ff > 0.0);
    }
}

TEST_CASE("iteration count stays bounded for |h| <= 0.2 b") {
    auto g = make_grid(TWO_PI, 32, 33, 1.0);
    GeometryBundle G = wave_geometry(g, 0.2);
    PressureSolver solver(g);
    PressureProblem prob;
    prob.tol = 1e-11;
    prob.F = dealias(random_volume(g, 7u, 5, 1.0));
    prob.G1 = dealias(random_surface(g, 8u, 5, 0.5));
    prob.G3 = dealias(random_surface(g, 9u, 5, 0.5));
    auto r = solver.solve(prob, G);
    CHECK(r.converged);
    CHECK(r.iterations <= 60);
}

TEST_CASE("indefinite operator is reported on corrupted geometry") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    GeometryBundle G = wave_geometry(g, 0.1);
    for (double& v : G.J.a) v = -v;  // corrupt: negative volume weight
    for (double& v : G.E33.a) v = -v;
    PressureSolver solver(g);
    PressureProblem prob;
    prob.variant = PressureVariant::NeumannTop;
    prob.F = random_volume(g, 3u, 4, 1.0);
    prob.G2 = SurfaceField(g);
    prob.G3 = SurfaceField(g);
    CHECK_THROWS_AS(solver.solve(prob, G), Error);
}

TEST_CASE("solver statistics are emitted as json lines when requested") {
    auto g = make_grid(TWO_PI, 16, 17, 1.0);
    GeometryBundle G = wave_geometry(g, 0.1);
    PressureSolver solver(g);
    std::vector<std::string> lines;
    solver.stats_sink = [&](const std::string& s) { lines.push_back(s); };
    PressureProblem prob;
    prob.F = random_volume(g, 5u, 4, 1.0);
    prob.G1 = SurfaceField(g);
    prob.G3 = SurfaceField(g);
    solver.solve(prob, G);
    REQUIRE(!lines.empty());
    CHECK(lines[0].find("\"iterations\"") != std::string::npos);
}
