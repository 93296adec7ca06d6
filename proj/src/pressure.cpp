#include "ffns/pressure.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace ffns {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct KrylovOut {
    int iterations = 0;
    double residual = 0.0;  // absolute
    bool converged = false;
};

// right-preconditioned BiCGSTAB; convergence is only accepted on the
// recomputed true residual, with periodic restarts against drift
template <class Apply, class Precond>
KrylovOut bicgstab(const Apply& apply, const Precond& precond, const std::vector<double>& b,
                   std::vector<double>& x, double target, int maxit) {
    const std::size_t n = b.size();
    std::vector<double> r(n), tmp(n);
    apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double rnorm = nrm2(r);
    KrylovOut out;

    std::vector<double> rhat = r, p(n, 0.0), vv(n, 0.0), s(n), t(n), phat(n), shat(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    auto true_residual = [&]() {
        apply(x, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] - tmp[i];
        return nrm2(tmp);
    };
    int since_restart = 0;
    double best = rnorm;
    double prev_true = 2.0 * rnorm + 1.0;
    int stagnant = 0;
    while (out.iterations < maxit) {
        if (rnorm <= target || since_restart >= 40) {
            const double tr = true_residual();
            r = tmp;
            rnorm = tr;
            if (rnorm <= target) break;
            if (tr > 0.95 * prev_true) break;  // true residual stalled (roundoff floor)
            prev_true = tr;
            rhat = r;
            p.assign(n, 0.0);
            vv.assign(n, 0.0);
            rho = alpha = omega = 1.0;
            since_restart = 0;
        }
        double rho1 = dot(rhat, r);
        if (std::abs(rho1) < 1e-300) {
            rhat = r;
            rho1 = dot(r, r);
            p.assign(n, 0.0);
            vv.assign(n, 0.0);
            rho = alpha = omega = 1.0;
        }
        const double beta = (rho1 / rho) * (alpha / omega);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * vv[i]);
        precond(p, phat);
        apply(phat, vv);
        const double rv = dot(rhat, vv);
        if (rv == 0.0) {
            rnorm = true_residual();
            r = tmp;
            rhat = r;
            p.assign(n, 0.0);
            vv.assign(n, 0.0);
            rho = alpha = omega = 1.0;
            since_restart = 0;
            ++out.iterations;
            continue;
        }
        alpha = rho1 / rv;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * vv[i];
        if (nrm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
            rnorm = 0.0;  // forces the true-residual check above
            ++out.iterations;
            rho = rho1;
            ++since_restart;
            continue;
        }
        precond(s, shat);
        apply(shat, t);
        const double tt = dot(t, t);
        if (tt == 0.0) break;
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho1;
        rnorm = nrm2(r);
        ++out.iterations;
        ++since_restart;
        if (omega == 0.0) break;
        if (rnorm < 0.5 * best) {
            best = rnorm;
            stagnant = 0;
        } else if (++stagnant > 60) {
            break;  // stalled; report the best true residual
        }
    }
    out.residual = true_residual();
    out.converged = out.residual <= target;
    return out;
}

} // namespace

struct PressureSolver::Impl {
    GridPtr grid;
    std::vector<double> Dz2;  // Dz*Dz, row-major
    std::vector<double> DzT;  // transpose of Dz

    std::map<int, Eigen::PartialPivLU<Eigen::MatrixXd>> strong_lu;  // Dirichlet top
    std::map<int, Eigen::LDLT<Eigen::MatrixXd>> weak_ldlt;          // Neumann/Neumann

    explicit Impl(GridPtr g) : grid(std::move(g)) {
        const Grid& gr = *grid;
        const int nz = gr.nz;
        Dz2.assign(std::size_t(nz) * nz, 0.0);
        DzT.assign(std::size_t(nz) * nz, 0.0);
        for (int i = 0; i < nz; ++i)
            for (int j = 0; j < nz; ++j) {
                double s = 0.0;
                for (int m = 0; m < nz; ++m)
                    s += gr.Dz[std::size_t(i) * nz + m] * gr.Dz[std::size_t(m) * nz + j];
                Dz2[std::size_t(i) * nz + j] = s;
                DzT[std::size_t(i) * nz + j] = gr.Dz[std::size_t(j) * nz + i];
            }
        build_lifting();
    }

    // projection lifting profile: Omega(z) with Dz Omega = omega, where
    // omega is the degree nz-2 polynomial vanishing at every interior node
    // (normalized to 1 at the top). Adding s(y) Omega(z) e3 to the velocity
    // shifts the divergence on the two boundary planes only and keeps the
    // bottom flux (Omega(-b) = 0), which is exactly the direction a pure
    // gradient correction cannot produce.
    std::vector<double> Omega, omega;

    void build_lifting() {
        const Grid& g = *grid;
        const int nz = g.nz;
        omega.assign(nz, 0.0);
        for (int j = 0; j < nz; ++j) {
            double p = 1.0;
            for (int m = 1; m < nz - 1; ++m) p *= (g.z[j] - g.z[m]);
            omega[j] = p;
        }
        const double top = omega[nz - 1];
        for (double& v : omega) v /= top;
        // nodal antiderivative with Omega(-b) = 0 via the differentiation matrix
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nz, nz);
        Eigen::VectorXd rhs(nz);
        for (int j = 1; j < nz; ++j) {
            for (int m = 0; m < nz; ++m) M(j, m) = g.Dz[std::size_t(j) * nz + m];
            rhs(j) = omega[j];
        }
        M(0, 0) = 1.0;
        rhs(0) = 0.0;
        Eigen::VectorXd Om = Eigen::PartialPivLU<Eigen::MatrixXd>(M).solve(rhs);
        Omega.assign(nz, 0.0);
        for (int j = 0; j < nz; ++j) Omega[j] = Om(j);
        // store the numerically consistent derivative so the preconditioner
        // matches the outer operator to roundoff
        std::vector<double> d(nz, 0.0);
        for (int j = 0; j < nz; ++j)
            for (int m = 0; m < nz; ++m) d[j] += g.Dz[std::size_t(j) * nz + m] * Omega[m];
        omega = d;
    }

    // influence data for the projection preconditioner: the mixed solve
    // (interior + bottom flux + top Dirichlet) is well conditioned, and the
    // free top trace mu together with the lifting dof s is fixed by the two
    // boundary-plane divergence rows through a 2x2 system per mode
    struct ProjInfluence {
        Eigen::VectorXd u1;      // mixed solve with Dirichlet trace 1
        double a_top, a_bot;     // (kk I - Dz^2) u1 at the boundary planes
        double det;              // 2x2 determinant with the omega column
    };
    std::map<int, ProjInfluence> proj_inf;

    const ProjInfluence& proj_influence(int k2int) {
        auto it = proj_inf.find(k2int);
        if (it != proj_inf.end()) return it->second;
        const Grid& g = *grid;
        const int nz = g.nz;
        const double kk = std::pow(2.0 * M_PI / g.L, 2) * k2int;
        ProjInfluence inf;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nz);
        rhs(nz - 1) = 1.0;
        inf.u1 = strong_factor(k2int).solve(rhs);
        auto Tat = [&](const Eigen::VectorXd& u, int j) {
            double s = kk * u(j);
            for (int m = 0; m < nz; ++m) s -= Dz2[std::size_t(j) * nz + m] * u(m);
            return s;
        };
        inf.a_top = Tat(inf.u1, nz - 1);
        inf.a_bot = Tat(inf.u1, 0);
        inf.det = inf.a_top * (-omega[0]) - (-omega[nz - 1]) * inf.a_bot;
        return proj_inf.emplace(k2int, std::move(inf)).first->second;
    }

    // augmented operator for the projection: x = [psi | s]
    void apply_proj(const GeometryBundle& G, const std::vector<double>& x,
                    std::vector<double>& out) const {
        const Grid& g = *grid;
        const std::size_t slab = g.nyy();
        const std::size_t nvol = g.nvol();
        VolumeField psi(grid);
        std::copy(x.begin(), x.begin() + nvol, psi.a.begin());
        VectorField w = grad_raw(psi);
        VectorField R = apply_E(G, w);
        for (int j = 0; j < g.nz; ++j) {
            const double c = Omega[j];
            double* r3 = R.c[2].a.data() + std::size_t(j) * slab;
            const double* s = x.data() + nvol;
            for (std::size_t i = 0; i < slab; ++i) r3[i] += s[i] * c;
        }
        VolumeField d = div_raw(R);
        out.resize(nvol + slab);
        for (std::size_t i = 0; i < nvol; ++i) out[i] = -d.a[i];
        for (std::size_t i = 0; i < slab; ++i) out[nvol + i] = R.c[2].a[i];
    }

    void precond_proj(const std::vector<double>& r, std::vector<double>& z) {
        const Grid& g = *grid;
        const std::size_t slab = g.nyy();
        const std::size_t nvol = g.nvol();
        const int nz = g.nz;
        std::vector<cplx> spec(nvol + slab);
        for (std::size_t i = 0; i < nvol + slab; ++i) spec[i] = r[i];
        g.fft_forward(spec.data(), nz);
        g.fft_forward(spec.data() + nvol, 1);
        Eigen::VectorXd re(nz), im(nz), xre(nz), xim(nz);
        for (int i1 = 0; i1 < g.ny; ++i1) {
            for (int i2 = 0; i2 < g.ny; ++i2) {
                const int k2int = k2_effective(i1, i2);
                const auto& lu = strong_factor(k2int);
                const auto& inf = proj_influence(k2int);
                const double kk = std::pow(2.0 * M_PI / g.L, 2) * k2int;
                const std::size_t off = g.sidx(i1, i2);
                // mixed sub-solve: interior rows, bottom flux row, zero trace
                for (int j = 1; j < nz - 1; ++j) {
                    const cplx v = spec[std::size_t(j) * slab + off];
                    re(j) = v.real();
                    im(j) = v.imag();
                }
                re(0) = spec[nvol + off].real();
                im(0) = spec[nvol + off].imag();
                re(nz - 1) = 0.0;
                im(nz - 1) = 0.0;
                xre = lu.solve(re);
                xim = lu.solve(im);
                // boundary-plane defects against the requested divergence rows
                auto Tat = [&](const Eigen::VectorXd& u, int j) {
                    double s = kk * u(j);
                    for (int m = 0; m < nz; ++m) s -= Dz2[std::size_t(j) * nz + m] * u(m);
                    return s;
                };
                const cplx f_top = spec[std::size_t(nz - 1) * slab + off];
                const cplx f_bot = spec[std::size_t(0) * slab + off];
                const cplx r_top = f_top - cplx(Tat(xre, nz - 1), Tat(xim, nz - 1));
                const cplx r_bot = f_bot - cplx(Tat(xre, 0), Tat(xim, 0));
                cplx mu(0.0, 0.0), sl(0.0, 0.0);
                if (std::abs(inf.det) > 1e-10 * (std::abs(inf.a_top) + 1.0)) {
                    // [a_top, -w_top; a_bot, -w_bot] (mu, s) = (r_top, r_bot)
                    mu = (r_top * (-omega[0]) - (-omega[nz - 1]) * r_bot) / inf.det;
                    sl = (inf.a_top * r_bot - inf.a_bot * r_top) / inf.det;
                } else {
                    // k = 0: the trace dof has no effect; s from the top row
                    sl = -r_top / omega[nz - 1];
                }
                for (int j = 0; j < nz; ++j)
                    spec[std::size_t(j) * slab + off] =
                        cplx(xre(j), xim(j)) + mu * inf.u1(j);
                spec[nvol + off] = sl;
            }
        }
        g.fft_backward(spec.data(), nz);
        g.fft_backward(spec.data() + nvol, 1);
        z.resize(nvol + slab);
        for (std::size_t i = 0; i < nvol + slab; ++i) z[i] = spec[i].real();
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd>& strong_factor(int k2int) {
        auto it = strong_lu.find(k2int);
        if (it != strong_lu.end()) return it->second;
        const Grid& g = *grid;
        const int nz = g.nz;
        const double kk = std::pow(2.0 * M_PI / g.L, 2) * k2int;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nz, nz);
        for (int j = 1; j < nz - 1; ++j) {
            for (int m = 0; m < nz; ++m) M(j, m) = -Dz2[std::size_t(j) * nz + m];
            M(j, j) += kk;
        }
        for (int m = 0; m < nz; ++m) M(0, m) = g.Dz[std::size_t(0) * nz + m];  // bottom Neumann
        M(nz - 1, nz - 1) = 1.0;                                               // top Dirichlet
        return strong_lu.emplace(k2int, Eigen::PartialPivLU<Eigen::MatrixXd>(M)).first->second;
    }

    const Eigen::LDLT<Eigen::MatrixXd>& weak_factor(int k2int) {
        auto it = weak_ldlt.find(k2int);
        if (it != weak_ldlt.end()) return it->second;
        const Grid& g = *grid;
        const int nz = g.nz;
        const double kk = std::pow(2.0 * M_PI / g.L, 2) * k2int;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nz, nz);
        for (int i = 0; i < nz; ++i)
            for (int j = 0; j < nz; ++j) {
                double s = 0.0;
                for (int m = 0; m < nz; ++m)
                    s += g.Dz[std::size_t(m) * nz + i] * g.zw[m] * g.Dz[std::size_t(m) * nz + j];
                M(i, j) = s;
            }
        for (int i = 0; i < nz; ++i) M(i, i) += kk * g.zw[i];
        if (k2int == 0) {
            // deflate the constant null space; only used as a preconditioner
            double wsum = 0.0;
            for (double w : g.zw) wsum += w;
            for (int i = 0; i < nz; ++i)
                for (int j = 0; j < nz; ++j) M(i, j) += g.zw[i] * g.zw[j] / wsum;
        }
        return weak_ldlt.emplace(k2int, Eigen::LDLT<Eigen::MatrixXd>(M)).first->second;
    }

    // strong collocation operator: interior -div(E grad q), top q or (E grad q).e3,
    // bottom (E grad q).e3
    void apply_strong(const GeometryBundle& G, PressureVariant variant,
                      const std::vector<double>& q, std::vector<double>& out) const {
        const Grid& g = *grid;
        VolumeField qf(grid);
        qf.a = q;
        VectorField w = grad_raw(qf);
        VectorField Ew = apply_E(G, w);
        VolumeField d = div_raw(Ew);
        out.resize(q.size());
        const std::size_t slab = g.nyy();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = -d.a[i];
        // bottom row
        for (std::size_t i = 0; i < slab; ++i) out[i] = Ew.c[2].a[i];
        // top row
        const std::size_t top = (std::size_t(g.nz) - 1) * slab;
        if (variant == PressureVariant::DirichletTop) {
            for (std::size_t i = 0; i < slab; ++i) out[top + i] = q[top + i];
        } else {
            for (std::size_t i = 0; i < slab; ++i) out[top + i] = Ew.c[2].a[top + i];
        }
    }

    // flat per-mode solve of the strong rows (Dirichlet top flavour)
    // integer |k|^2 consistent with the derivative convention (Nyquist zeroed)
    int k2_effective(int i1, int i2) const {
        const Grid& g = *grid;
        const int n1 = (i1 == g.ny / 2) ? 0 : g.kidx[i1];
        const int n2 = (i2 == g.ny / 2) ? 0 : g.kidx[i2];
        return n1 * n1 + n2 * n2;
    }

    void precond_strong(const std::vector<double>& r, std::vector<double>& z) {
        const Grid& g = *grid;
        std::vector<cplx> spec(r.begin(), r.end());
        g.fft_forward(spec.data(), g.nz);
        const int nz = g.nz;
        Eigen::VectorXd re(nz), im(nz), xre(nz), xim(nz);
        for (int i1 = 0; i1 < g.ny; ++i1) {
            for (int i2 = 0; i2 < g.ny; ++i2) {
                const int k2int = k2_effective(i1, i2);
                const auto& lu = strong_factor(k2int);
                const std::size_t off = g.sidx(i1, i2);
                for (int j = 0; j < nz; ++j) {
                    const cplx v = spec[std::size_t(j) * g.nyy() + off];
                    re(j) = v.real();
                    im(j) = v.imag();
                }
                xre = lu.solve(re);
                xim = lu.solve(im);
                for (int j = 0; j < nz; ++j)
                    spec[std::size_t(j) * g.nyy() + off] = cplx(xre(j), xim(j));
            }
        }
        g.fft_backward(spec.data(), g.nz);
        z.resize(r.size());
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = spec[i].real();
    }

    void precond_weak(const std::vector<double>& r, std::vector<double>& z) {
        const Grid& g = *grid;
        std::vector<cplx> spec(r.begin(), r.end());
        g.fft_forward(spec.data(), g.nz);
        const int nz = g.nz;
        Eigen::VectorXd re(nz), im(nz), xre(nz), xim(nz);
        for (int i1 = 0; i1 < g.ny; ++i1) {
            for (int i2 = 0; i2 < g.ny; ++i2) {
                const int k2int = k2_effective(i1, i2);
                const auto& ch = weak_factor(k2int);
                const std::size_t off = g.sidx(i1, i2);
                for (int j = 0; j < nz; ++j) {
                    const cplx v = spec[std::size_t(j) * g.nyy() + off];
                    re(j) = v.real() / g.hw;
                    im(j) = v.imag() / g.hw;
                }
                xre = ch.solve(re);
                xim = ch.solve(im);
                for (int j = 0; j < nz; ++j)
                    spec[std::size_t(j) * g.nyy() + off] = cplx(xre(j), xim(j));
            }
        }
        g.fft_backward(spec.data(), g.nz);
        z.resize(r.size());
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = spec[i].real();
    }

    // quadrature weak operator with dealiased gradients; symmetric PSD
    void apply_weak(const GeometryBundle& G, const std::vector<double>& q,
                    std::vector<double>& out) const {
        const Grid& g = *grid;
        VolumeField qf(grid);
        qf.a = q;
        VolumeField qm = dealias(qf);
        VectorField w = grad_raw(qm);
        VectorField Ew = apply_E(G, w);
        for (int j = 0; j < g.nz; ++j) {
            const double wz = g.hw * g.zw[j];
            for (int c = 0; c < 3; ++c) {
                double* slab = Ew.c[c].a.data() + std::size_t(j) * g.nyy();
                for (std::size_t i = 0; i < g.nyy(); ++i) slab[i] *= wz;
            }
        }
        VolumeField d1 = horizontal_derivative(Ew.c[0], 1);
        VolumeField d2 = horizontal_derivative(Ew.c[1], 2);
        VolumeField dz(grid);
        apply_DzT(Ew.c[2].a.data(), dz.a.data());
        VolumeField res(grid);
        for (std::size_t i = 0; i < res.a.size(); ++i)
            res.a[i] = -d1.a[i] - d2.a[i] + dz.a[i];
        res = dealias(res);
        out = std::move(res.a);
    }

    void apply_DzT(const double* src, double* dst) const {
        const Grid& g = *grid;
        const std::size_t slab = g.nyy();
        for (int j = 0; j < g.nz; ++j) {
            double* out = dst + std::size_t(j) * slab;
            std::fill(out, out + slab, 0.0);
            for (int m = 0; m < g.nz; ++m) {
                const double w = DzT[std::size_t(j) * g.nz + m];
                const double* in = src + std::size_t(m) * slab;
                for (std::size_t i = 0; i < slab; ++i) out[i] += w * in[i];
            }
        }
    }
};

PressureSolver::PressureSolver(GridPtr grid) : impl_(std::make_unique<Impl>(std::move(grid))) {}
PressureSolver::~PressureSolver() = default;

PressureProblem assemble_rhs(const VectorField& v, const GeometryBundle& G, double epsilon,
                             double sigma, double gravity, PressureVariant variant,
                             const VectorField* dv_dt) {
    PressureProblem prob;
    prob.variant = variant;
    const GridPtr grid = G.grid;

    // F = dz(phi) * tr((grad^phi v)^2)
    std::array<VectorField, 3> A = grad_phi_tensor(v, G);
    VolumeField F(grid);
    for (std::size_t k = 0; k < F.a.size(); ++k) {
        double tr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += A[std::size_t(j)].c[i].a[k] * A[std::size_t(i)].c[j].a[k];
        F.a[k] = G.J.a[k] * tr;
    }
    prob.F = dealias(F);

    // G1 = 2 eps S n.n + g h - sigma H on z=0
    SurfaceField G1(grid);
    if (epsilon != 0.0) {
        SymTensorField S = strain(v, G);
        VolumeField snn(grid);
        for (std::size_t k = 0; k < snn.a.size(); ++k) {
            const double n1 = G.n.c[0].a[k], n2 = G.n.c[1].a[k], n3 = G.n.c[2].a[k];
            snn.a[k] = S.c[0].a[k] * n1 * n1 + S.c[3].a[k] * n2 * n2 + S.c[5].a[k] * n3 * n3 +
                       2.0 * (S.c[1].a[k] * n1 * n2 + S.c[2].a[k] * n1 * n3 + S.c[4].a[k] * n2 * n3);
        }
        G1 = trace_top(snn);
        for (std::size_t k = 0; k < G1.a.size(); ++k) G1.a[k] *= 2.0 * epsilon;
    }
    for (std::size_t k = 0; k < G1.a.size(); ++k)
        G1.a[k] += gravity * G.h.a[k] - sigma * G.H.a[k];
    prob.G1 = dealias(G1);

    // G3 = eps lap^phi v . N at z=-b (N = e3 there)
    prob.G3 = SurfaceField(grid);
    VectorField lap;
    bool have_lap = false;
    if (epsilon != 0.0) {
        lap = VectorField(grid);
        for (int c = 0; c < 3; ++c) lap.c[c] = lap_phi(v.c[c], G);
        have_lap = true;
        VolumeField ln = dot_N(G, lap);
        prob.G3 = trace_bottom(ln);
        for (double& x : prob.G3.a) x *= epsilon;
    }

    prob.G2 = SurfaceField(grid);
    if (variant == PressureVariant::NeumannTop) {
        if (!dv_dt)
            throw Error(ErrorCode::InsufficientHistory,
                        "assemble_rhs: NeumannTop needs dv/dt from history");
        VolumeField adv1 = multiply_dealias(v.c[0], horizontal_derivative(v.c[0], 1)) +
                           multiply_dealias(v.c[1], horizontal_derivative(v.c[0], 2));
        VolumeField adv2 = multiply_dealias(v.c[0], horizontal_derivative(v.c[1], 1)) +
                           multiply_dealias(v.c[1], horizontal_derivative(v.c[1], 2));
        VolumeField adv3 = multiply_dealias(v.c[0], horizontal_derivative(v.c[2], 1)) +
                           multiply_dealias(v.c[1], horizontal_derivative(v.c[2], 2));
        VectorField rhs(grid);
        for (std::size_t k = 0; k < rhs.c[0].a.size(); ++k) {
            rhs.c[0].a[k] = -dv_dt->c[0].a[k] - adv1.a[k];
            rhs.c[1].a[k] = -dv_dt->c[1].a[k] - adv2.a[k];
            rhs.c[2].a[k] = -dv_dt->c[2].a[k] - adv3.a[k];
        }
        if (epsilon != 0.0) {
            if (!have_lap) {
                lap = VectorField(grid);
                for (int c = 0; c < 3; ++c) lap.c[c] = lap_phi(v.c[c], G);
            }
            for (int c = 0; c < 3; ++c) axpy(epsilon, lap.c[c], rhs.c[c]);
        }
        VolumeField rn = dot_N(G, rhs);
        prob.G2 = dealias(trace_top(rn));
    }
    return prob;
}

SolveResult PressureSolver::solve(const PressureProblem& prob, const GeometryBundle& G,
                                  const VolumeField* initial_guess) {
    const Grid& g = *impl_->grid;
    const std::size_t n = g.nvol();
    const std::size_t slab = g.nyy();
    SolveResult out;
    out.q = VolumeField(impl_->grid);

    std::vector<double> b(n);
    const bool dirichlet = prob.variant == PressureVariant::DirichletTop;

    if (dirichlet) {
        for (std::size_t i = 0; i < n; ++i) b[i] = prob.F.a[i];
        for (std::size_t i = 0; i < slab; ++i) b[i] = prob.G3.a[i];
        const std::size_t top = n - slab;
        for (std::size_t i = 0; i < slab; ++i) b[top + i] = prob.G1.a[i];
    } else {
        // weak right side: w F + surface terms, then compatibility projection
        for (int j = 0; j < g.nz; ++j)
            for (std::size_t i = 0; i < slab; ++i)
                b[std::size_t(j) * slab + i] = g.hw * g.zw[j] * prob.F.a[std::size_t(j) * slab + i];
        const std::size_t top = n - slab;
        for (std::size_t i = 0; i < slab; ++i) {
            b[top + i] += g.hw * prob.G2.a[i];
            b[i] -= g.hw * prob.G3.a[i];
        }
        VolumeField bf(impl_->grid);
        bf.a = b;
        bf = dealias(bf);
        b = std::move(bf.a);
        double m = 0.0;
        for (double x : b) m += x;
        m /= double(n);
        for (double& x : b) x -= m;
    }

    const double bnorm = nrm2(b);
    if (bnorm == 0.0) {
        out.converged = true;
        return out;
    }
    const double target = prob.tol * bnorm;

    std::vector<double> x(n, 0.0);
    if (initial_guess && initial_guess->a.size() == n) x = initial_guess->a;

    auto apply = [&](const std::vector<double>& in, std::vector<double>& res) {
        if (dirichlet)
            impl_->apply_strong(G, prob.variant, in, res);
        else
            impl_->apply_weak(G, in, res);
    };
    auto precond = [&](const std::vector<double>& in, std::vector<double>& res) {
        if (dirichlet) {
            impl_->precond_strong(in, res);
        } else {
            impl_->precond_weak(in, res);
            double m = 0.0;
            for (double v : res) m += v;
            m /= double(res.size());
            for (double& v : res) v -= m;
        }
    };

    std::vector<double> r(n);
    double rnorm = 0.0;
    int iters = 0;

    if (dirichlet) {
        KrylovOut ko = bicgstab(apply, precond, b, x, target, prob.maxit);
        iters = ko.iterations;
        rnorm = ko.residual;
    } else {
        // PCG on the gauge-fixed space
        std::vector<double> z(n), p(n), Ap(n);
        apply(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        rnorm = nrm2(r);
        precond(r, z);
        p = z;
        double rz = dot(r, z);
        while (rnorm > target && iters < prob.maxit) {
            apply(p, Ap);
            const double pAp = dot(p, Ap);
            if (pAp <= 0.0)
                throw Error(ErrorCode::IndefiniteOperator,
                            "pressure solve: bilinear form lost positivity");
            const double alpha = rz / pAp;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            rnorm = nrm2(r);
            ++iters;
            if (rnorm <= target) break;
            precond(r, z);
            const double rz1 = dot(r, z);
            const double beta = rz1 / rz;
            rz = rz1;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }

    out.iterations = iters;
    out.residual = rnorm / bnorm;
    out.converged = rnorm <= target;
    out.q.a = std::move(x);
    if (!dirichlet) {
        // zero-mean gauge in the volume quadrature sense
        const double vol = g.L * g.L * g.b;
        const double m = vol_integral(out.q) / vol;
        for (double& v : out.q.a) v -= m;
    }
    if (stats_sink) {
        std::ostringstream os;
        os << "{\"solver\":\"" << (dirichlet ? "dirichlet_top" : "neumann_top")
           << "\",\"iterations\":" << out.iterations << ",\"relative_residual\":" << out.residual
           << ",\"converged\":" << (out.converged ? "true" : "false") << "}";
        stats_sink(os.str());
    }
    return out;
}

PressureSolver::ProjectResult PressureSolver::project(const VectorField& v,
                                                      const GeometryBundle& G, double dt,
                                                      double tol, int maxit,
                                                      const VolumeField* initial_guess) {
    const Grid& g = *impl_->grid;
    const std::size_t slab = g.nyy();
    const std::size_t nvol = g.nvol();

    // rows: -div(P v - E grad psi - s c e3) on every plane, plus the bottom
    // flux; the lifting dof s absorbs the boundary-plane divergence that a
    // pure-gradient collocation correction cannot reach
    VectorField Pv = apply_P(G, v);
    VolumeField d = div_raw(Pv);
    std::vector<double> b(nvol + slab);
    for (std::size_t i = 0; i < nvol; ++i) b[i] = -d.a[i];
    for (std::size_t i = 0; i < slab; ++i) b[nvol + i] = Pv.c[2].a[i];

    ProjectResult out;
    out.v = v;
    out.q = VolumeField(impl_->grid);
    const double bnorm = nrm2(b);
    // absolute floor: an already divergence-free field yields b at roundoff
    double vscale = 0.0;
    for (int c = 0; c < 3; ++c) vscale = std::max(vscale, max_abs(Pv.c[c]));
    const double floor_abs =
        1e-13 * (1.0 + vscale) * double(g.nz) * g.nz / g.b * std::sqrt(double(nvol));
    if (bnorm <= floor_abs) return out;

    std::vector<double> x(nvol + slab, 0.0);
    if (initial_guess && initial_guess->a.size() == nvol)
        std::copy(initial_guess->a.begin(), initial_guess->a.end(), x.begin());
    else if (have_last_proj_ && last_proj_aug_.size() == nvol + slab)
        x = last_proj_aug_;

    auto apply = [&](const std::vector<double>& in, std::vector<double>& res) {
        impl_->apply_proj(G, in, res);
    };
    auto precond = [&](const std::vector<double>& in, std::vector<double>& res) {
        impl_->precond_proj(in, res);
    };
    KrylovOut ko = bicgstab(apply, precond, b, x, std::max(tol * bnorm, floor_abs), maxit);
    if (!ko.converged)
        throw Error(ErrorCode::NotConverged,
                    "projection solve stalled at relative residual " +
                        std::to_string(ko.residual / bnorm));
    out.iterations = ko.iterations;
    out.residual = ko.residual / bnorm;

    VolumeField psi(impl_->grid);
    std::copy(x.begin(), x.begin() + nvol, psi.a.begin());
    VectorField corr = grad_phi_raw(psi, G);
    for (int c = 0; c < 3; ++c) axpy(-1.0, corr.c[c], out.v.c[c]);
    for (int j = 0; j < g.nz; ++j) {
        const double c = impl_->Omega[j];
        double* v3 = out.v.c[2].a.data() + std::size_t(j) * slab;
        for (std::size_t i = 0; i < slab; ++i) v3[i] -= x[nvol + i] * c;
    }
    out.q = (1.0 / dt) * psi;
    last_proj_aug_ = std::move(x);
    have_last_proj_ = true;
    if (stats_sink) {
        std::ostringstream os;
        os << "{\"solver\":\"projection\",\"iterations\":" << out.iterations
           << ",\"relative_residual\":" << out.residual << ",\"converged\":true}";
        stats_sink(os.str());
    }
    return out;
}

double PressureSolver::bilinear(const GeometryBundle& G, const VolumeField& f,
                                const VolumeField& g_) const {
    const Grid& g = *impl_->grid;
    VectorField wf = grad_raw(dealias(f));
    VectorField wg = grad_raw(dealias(g_));
    VectorField Ef = apply_E(G, wf);
    double s = 0.0;
    for (int j = 0; j < g.nz; ++j) {
        const double wz = g.hw * g.zw[j];
        for (int c = 0; c < 3; ++c) {
            const double* a = Ef.c[c].a.data() + std::size_t(j) * g.nyy();
            const double* bb = wg.c[c].a.data() + std::size_t(j) * g.nyy();
            double sj = 0.0;
            for (std::size_t i = 0; i < g.nyy(); ++i) sj += a[i] * bb[i];
            s += wz * sj;
        }
    }
    return s;
}

} // namespace ffns
