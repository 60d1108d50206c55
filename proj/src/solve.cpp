#include "fracond/solve.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>

namespace fracond {

DirichletProblem make_dirichlet_problem(FormKind kind, const Conductivity& cond,
                                        const RegionLayout& layout,
                                        const GridFunction& exterior_data) {
    check_same_grid(cond.spec(), layout.spec, "make_dirichlet_problem");
    check_same_grid(cond.spec(), exterior_data.spec, "make_dirichlet_problem");
    check_finite(exterior_data, "make_dirichlet_problem");
    for (long i : layout.omega)
        if (exterior_data[i] != 0.0)
            throw InvalidArgument(
                "make_dirichlet_problem: exterior data must vanish on Omega nodes");
    return DirichletProblem{kind, cond, layout, exterior_data};
}

Eigen::MatrixXd form_block(const KernelWeights& kw, const Conductivity& cond,
                           FormKind kind, const std::vector<long>& rows,
                           const std::vector<long>& cols) {
    check_same_grid(kw.spec(), cond.spec(), "form_block");
    const GridSpec& spec = kw.spec();
    const long count = spec.node_count();
    const std::vector<double>& tail = kw.tail();
    const double* a = cond.sqrt_gamma().values.data();
    const bool weighted = kind == FormKind::conductivity;
    GridFunction q;
    if (kind == FormKind::schrodinger) {
        kw.params().require_subcritical("schrodinger form");
        q = potential(kw, cond);
    }
    const double hn = spec.cell_volume();

    Eigen::MatrixXd out(rows.size(), cols.size());
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < rows.size(); ++p) {
        const long i = rows[p];
        for (std::size_t qd = 0; qd < cols.size(); ++qd) {
            const long j = cols[qd];
            if (i != j) {
                double w = kw.pair_weight(i, j);
                if (weighted) w *= a[i] * a[j];
                out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(qd)) = -2.0 * w;
            } else {
                double diag = 0.0;
                for (long k = 0; k < count; ++k) {
                    if (k == i) continue;
                    double w = kw.pair_weight(i, k);
                    if (weighted) w *= a[i] * a[k];
                    diag += 2.0 * w;
                }
                if (weighted)
                    diag += tail[static_cast<std::size_t>(i)] * a[i];
                else
                    diag += tail[static_cast<std::size_t>(i)] + hn * q[i];
                out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(qd)) = diag;
            }
        }
    }
    return out;
}

namespace {

// rhs_p = -sum_{j exterior} A(omega[p], j) f_j; only pair couplings enter.
Eigen::VectorXd coupling_rhs(const KernelWeights& kw, const Conductivity& cond,
                             FormKind kind, const RegionLayout& layout,
                             const GridFunction& f) {
    const double* a = cond.sqrt_gamma().values.data();
    const bool weighted = kind == FormKind::conductivity;
    Eigen::VectorXd rhs(layout.omega.size());
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < layout.omega.size(); ++p) {
        const long i = layout.omega[p];
        double acc = 0.0;
        for (long j : layout.exterior) {
            const double fj = f[j];
            if (fj == 0.0) continue;
            double w = kw.pair_weight(i, j);
            if (weighted) w *= a[i] * a[j];
            acc += 2.0 * w * fj;
        }
        rhs(static_cast<Eigen::Index>(p)) = acc;
    }
    return rhs;
}

// A_OmegaOmega x, matrix-free: zero-extend, apply the full operator row
// form, restrict back.
Eigen::VectorXd interior_apply(const KernelWeights& kw, const Conductivity& cond,
                               FormKind kind, const RegionLayout& layout,
                               const Eigen::VectorXd& x) {
    GridFunction xf(kw.spec());
    for (std::size_t p = 0; p < layout.omega.size(); ++p)
        xf[layout.omega[p]] = x(static_cast<Eigen::Index>(p));
    GridFunction ax = apply_form(kw, cond, kind, xf);
    Eigen::VectorXd out(layout.omega.size());
    for (std::size_t p = 0; p < layout.omega.size(); ++p)
        out(static_cast<Eigen::Index>(p)) = ax[layout.omega[p]];
    return out;
}

}  // namespace

Solution dirichlet_solve(const KernelWeights& kw, const DirichletProblem& p, double tol) {
    SolveOptions opts;
    opts.tol = tol;
    return dirichlet_solve(kw, p, opts);
}

Solution dirichlet_solve(const KernelWeights& kw, const DirichletProblem& p,
                         const SolveOptions& opts) {
    check_same_grid(kw.spec(), p.cond.spec(), "dirichlet_solve");
    if (p.kind == FormKind::schrodinger)
        kw.params().require_subcritical("schrodinger solve");
    const auto t0 = std::chrono::steady_clock::now();

    const auto& omega = p.layout.omega;
    const long n_int = static_cast<long>(omega.size());
    if (n_int == 0) throw GeometryError("dirichlet_solve: empty Omega");

    Eigen::VectorXd rhs = coupling_rhs(kw, p.cond, p.kind, p.layout, p.exterior_data);
    const double rhs_norm = rhs.norm();

    Solution sol;
    sol.u = p.exterior_data;  // exterior values imposed strongly
    Eigen::VectorXd x(n_int);

    if (!opts.force_cg && n_int <= opts.dense_threshold) {
        Eigen::MatrixXd K = form_block(kw, p.cond, p.kind, omega, omega);
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        if (llt.info() != Eigen::Success)
            throw IndefiniteFormError(
                "dirichlet_solve: interior block is not positive definite");
        x = llt.solve(rhs);
        int refinements = 0;
        if (rhs_norm > 0.0) {
            for (; refinements < 3; ++refinements) {
                Eigen::VectorXd r = rhs - K * x;
                if (r.norm() <= opts.tol * rhs_norm) break;
                x += llt.solve(r);
            }
        }
        sol.diag.method = "cholesky";
        sol.diag.iterations = refinements;
        sol.diag.rel_residual = rhs_norm > 0.0 ? (rhs - K * x).norm() / rhs_norm : 0.0;
    } else {
        // plain CG on the interior block
        x.setZero();
        if (opts.initial_guess) {
            check_same_grid(opts.initial_guess->spec, kw.spec(), "dirichlet_solve");
            for (long q = 0; q < n_int; ++q) x(q) = (*opts.initial_guess)[omega[q]];
        }
        Eigen::VectorXd r = rhs - interior_apply(kw, p.cond, p.kind, p.layout, x);
        Eigen::VectorXd d = r;
        double rr = r.squaredNorm();
        const long max_it =
            static_cast<long>(20.0 * std::sqrt(static_cast<double>(n_int))) + 10;
        long it = 0;
        const double stop = opts.tol * (rhs_norm > 0 ? rhs_norm : 1.0);
        while (std::sqrt(rr) > stop) {
            if (it++ >= max_it)
                throw SolverError("dirichlet_solve: CG failed to converge in " +
                                  std::to_string(max_it) + " iterations");
            Eigen::VectorXd ad = interior_apply(kw, p.cond, p.kind, p.layout, d);
            const double dad = d.dot(ad);
            if (!(dad > 0.0))
                throw IndefiniteFormError(
                    "dirichlet_solve: interior block is not positive definite (CG)");
            const double alpha = rr / dad;
            x += alpha * d;
            r -= alpha * ad;
            const double rr_new = r.squaredNorm();
            d = r + (rr_new / rr) * d;
            rr = rr_new;
        }
        sol.diag.method = "cg";
        sol.diag.iterations = static_cast<int>(it);
        sol.diag.rel_residual = rhs_norm > 0.0 ? std::sqrt(rr) / rhs_norm : 0.0;
    }

    for (long q = 0; q < n_int; ++q) sol.u[omega[q]] = x(q);
    sol.diag.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

EllipticCheck elliptic_estimate_check(const KernelWeights& kw, const DirichletProblem& p,
                                      const Solution& sol) {
    std::vector<long> support;
    for (long j : p.layout.exterior)
        if (p.exterior_data[j] != 0.0) support.push_back(j);
    if (!support.empty() && lattice_gap(p.layout.spec, support, p.layout.omega) < 2)
        throw GeometryError(
            "elliptic_estimate_check: exterior data must keep at least one empty "
            "cell away from Omega");
    GridFunction d = sub(sol.u, p.exterior_data);
    EllipticCheck out;
    out.lhs = std::sqrt(dot_l2(d, d) + b_one(kw, d, d));
    out.rhs_scale = norms(p.exterior_data).l2;
    return out;
}

double poincare_constant(const KernelWeights& kw, const RegionLayout& layout,
                         double eig_tol) {
    if (layout.omega.empty()) throw GeometryError("poincare_constant: empty Omega");
    Conductivity one = Conductivity::constant_one(kw.spec());
    Eigen::MatrixXd K = form_block(kw, one, FormKind::conductivity, layout.omega,
                                   layout.omega);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw SolverError("poincare_constant: interior block not SPD");

    // inverse power iteration for the smallest eigenvalue of K
    Eigen::VectorXd x = Eigen::VectorXd::Ones(K.rows());
    x.normalize();
    double theta_prev = 0.0;
    for (int it = 0; it < 50000; ++it) {
        Eigen::VectorXd y = llt.solve(x);
        const double theta = x.dot(y);  // Rayleigh quotient of K^{-1}
        y.normalize();
        x = y;
        if (it > 0 && std::abs(theta - theta_prev) <= eig_tol * std::abs(theta)) {
            return std::sqrt(kw.spec().cell_volume() * theta);
        }
        theta_prev = theta;
    }
    throw SolverError("poincare_constant: inverse power iteration did not converge");
}

}  // namespace fracond
