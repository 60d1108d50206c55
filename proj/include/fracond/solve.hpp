#ifndef FRACOND_SOLVE_HPP
#define FRACOND_SOLVE_HPP

#include <optional>
#include <string>

#include "fracond/forms.hpp"

namespace fracond {

/// Exterior-value problem: find u with u = f on exterior nodes and
/// form(u, e_k) = 0 for every interior nodal test function e_k.
struct DirichletProblem {
    FormKind kind = FormKind::conductivity;
    Conductivity cond;
    RegionLayout layout;
    GridFunction exterior_data;
};

/// Validates that f vanishes on Omega nodes (u - f is interior-supported).
DirichletProblem make_dirichlet_problem(FormKind kind, const Conductivity& cond,
                                        const RegionLayout& layout,
                                        const GridFunction& exterior_data);

struct SolveDiagnostics {
    std::string method;       // "cholesky" or "cg"
    int iterations = 0;       // refinement steps or CG iterations
    double rel_residual = 0;  // ||K u - b|| / ||b|| on interior unknowns
    double wall_seconds = 0;
};

struct Solution {
    GridFunction u;
    SolveDiagnostics diag;
};

struct SolveOptions {
    double tol = 1e-12;
    long dense_threshold = 5000;  // unknowns above this go to CG
    bool force_cg = false;
    std::optional<GridFunction> initial_guess;  // CG warm start, full-grid
};

Solution dirichlet_solve(const KernelWeights& w, const DirichletProblem& p,
                         double tol = 1e-12);
Solution dirichlet_solve(const KernelWeights& w, const DirichletProblem& p,
                         const SolveOptions& opts);

/// Dense block of the form matrix: entry (p,q) = form(e_{rows[p]}, e_{cols[q]}).
/// Diagonal entries carry the full row sum plus the tail (and the potential
/// term for the Schroedinger form).
Eigen::MatrixXd form_block(const KernelWeights& w, const Conductivity& cond,
                           FormKind kind, const std::vector<long>& rows,
                           const std::vector<long>& cols);

struct EllipticCheck {
    double lhs = 0;        // (||u-f||_L2^2 + B_1(u-f,u-f))^(1/2)
    double rhs_scale = 0;  // ||f||_L2
    double ratio() const { return rhs_scale > 0 ? lhs / rhs_scale : 0.0; }
};

/// Monitors the exterior-source energy bound; requires the data window to
/// keep at least one empty cell away from Omega.
EllipticCheck elliptic_estimate_check(const KernelWeights& w, const DirichletProblem& p,
                                      const Solution& sol);

/// C_h = max ||u||_L2 / B_1(u,u)^(1/2) over interior-supported u, via
/// inverse power iteration on the interior block.
double poincare_constant(const KernelWeights& w, const RegionLayout& layout,
                         double eig_tol = 1e-8);

}  // namespace fracond

#endif
