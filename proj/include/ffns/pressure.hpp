#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "ffns/operators.hpp"

namespace ffns {

enum class PressureVariant { DirichletTop, NeumannTop };

/// Data of the elliptic problem -div(E grad q) = F with the two top
/// boundary-condition choices; G2/G3 are Neumann data E grad q . e3 at z=0
/// and z=-b, G1 is the Dirichlet trace at z=0.
struct PressureProblem {
    VolumeField F;
    SurfaceField G1, G2, G3;
    PressureVariant variant = PressureVariant::DirichletTop;
    double tol = 1e-11;
    int maxit = 400;
};

struct SolveResult {
    VolumeField q;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

struct SimParams;  // stepper.hpp

/// F, G1, G3 from the current state; G2 additionally needs dv/dt (history
/// or analytic) and is only assembled for the NeumannTop diagnostic.
PressureProblem assemble_rhs(const VectorField& v, const GeometryBundle& G, double epsilon,
                             double sigma, double gravity, PressureVariant variant,
                             const VectorField* dv_dt = nullptr);

/// Krylov solver with the flat-geometry operator as a per-horizontal-mode
/// preconditioner. DirichletTop runs on the collocation (strong) form so the
/// pointwise residual is controlled; NeumannTop runs on the quadrature weak
/// form, which is symmetric positive on the gauge-fixed space, with the
/// zero-mean gauge.
class PressureSolver {
  public:
    explicit PressureSolver(GridPtr grid);
    ~PressureSolver();

    SolveResult solve(const PressureProblem& prob, const GeometryBundle& G,
                      const VolumeField* initial_guess = nullptr);

    /// v_df = v - grad^phi(psi) with psi from the DirichletTop solve of
    /// div(E grad psi) = div(P v); returned q = psi / dt.
    struct ProjectResult {
        VectorField v;
        VolumeField q;
        int iterations = 0;
        double residual = 0.0;
    };
    ProjectResult project(const VectorField& v, const GeometryBundle& G, double dt, double tol,
                          int maxit, const VolumeField* initial_guess = nullptr);

    /// Quadrature bilinear form sum w E grad f . grad g (dealiased gradients).
    double bilinear(const GeometryBundle& G, const VolumeField& f, const VolumeField& g) const;

    std::function<void(const std::string&)> stats_sink;  // JSON lines when set

    void reset_warm_start() { have_last_proj_ = false; }

    // exposed for white-box tests
    struct Impl;
    Impl& impl() { return *impl_; }

  private:
    std::unique_ptr<Impl> impl_;
    std::vector<double> last_proj_aug_;
    bool have_last_proj_ = false;
};

} // namespace ffns
