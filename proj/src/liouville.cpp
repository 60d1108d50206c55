#include "fracond/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fracond {

ReductionReport reduce(const KernelWeights& kw, const Conductivity& cond,
                       const RegionLayout& layout, const GridFunction& g,
                       double tol, unsigned batch_seed) {
    kw.params().require_subcritical("reduce");
    DirichletProblem cp = make_dirichlet_problem(FormKind::conductivity, cond, layout, g);
    Solution ug = dirichlet_solve(kw, cp, tol);

    GridFunction f = pointwise_mul(cond.sqrt_gamma(), g);
    DirichletProblem sp = make_dirichlet_problem(FormKind::schrodinger, cond, layout, f);
    Solution v = dirichlet_solve(kw, sp, tol);

    ReductionReport rep;
    rep.conductivity_solve = ug.diag;
    rep.schrodinger_solve = v.diag;
    rep.correspondence_residual =
        norms(sub(pointwise_mul(cond.sqrt_gamma(), ug.u), v.u)).linf;

    std::mt19937_64 rng(batch_seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const GridSpec& spec = kw.spec();
    for (int k = 0; k < 8; ++k) {
        GridFunction u(spec), phi(spec);
        for (long i = 0; i < u.size(); ++i) {
            u[i] = unif(rng);
            phi[i] = unif(rng);
        }
        rep.identity_residual =
            std::max(rep.identity_residual, liouville_residual(kw, cond, u, phi));

        GridFunction psi(spec);
        const GridFunction& isg = cond.inv_sqrt_gamma();
        for (long i = 0; i < u.size(); ++i) psi[i] = isg[i] * (u[i] * phi[i]);
        const double denom = std::sqrt(b_one(kw, cond.deviation(), cond.deviation()) *
                                       b_one(kw, psi, psi));
        if (denom > 0.0)
            rep.q_cauchy_schwarz_ratio =
                std::max(rep.q_cauchy_schwarz_ratio,
                         std::abs(q_form(kw, cond, u, phi)) / denom);
    }
    rep.q_max_abs = norms(potential(kw, cond)).linf;
    return rep;
}

RelationReport relation_of_solutions_check(const KernelWeights& kw,
                                           const Conductivity& cond1,
                                           const Conductivity& cond2,
                                           const RegionLayout& layout,
                                           const GridFunction& f, double tol) {
    check_same_grid(cond1.spec(), cond2.spec(), "relation_of_solutions_check");
    for (long i : layout.w2)
        if (cond1.gamma()[i] != cond2.gamma()[i])
            throw InvalidArgument(
                "relation_of_solutions_check: conductivities must agree on W2");
    for (long i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) continue;
        if (!std::binary_search(layout.w1.begin(), layout.w1.end(), i))
            throw InvalidArgument(
                "relation_of_solutions_check: f must be supported in W1");
    }

    Solution u1 = dirichlet_solve(
        kw, make_dirichlet_problem(FormKind::conductivity, cond1, layout, f), tol);
    Solution u2 = dirichlet_solve(
        kw, make_dirichlet_problem(FormKind::conductivity, cond2, layout, f), tol);

    RelationReport rep;
    rep.solve1 = u1.diag;
    rep.solve2 = u2.diag;
    rep.sup_diff = norms(sub(pointwise_mul(cond1.sqrt_gamma(), u1.u),
                             pointwise_mul(cond2.sqrt_gamma(), u2.u)))
                       .linf;
    return rep;
}

double dn_partial_gap(const DnMatrix& dn1, const DnMatrix& dn2,
                      const RegionLayout& layout) {
    DnBlock b1 = restrict_block(dn1, layout.w1, layout.w2);
    DnBlock b2 = restrict_block(dn2, layout.w1, layout.w2);
    const double scale = b1.m.cwiseAbs().maxCoeff();
    const double diff = (b1.m - b2.m).cwiseAbs().maxCoeff();
    return scale > 0.0 ? diff / scale : diff;
}

double alessandrini_decomposition_residual(const KernelWeights& kw,
                                           const Conductivity& cond1,
                                           const Conductivity& cond2,
                                           const GridFunction& f,
                                           const Solution& uf1, const Solution& uf2) {
    for (long i = 0; i < f.size(); ++i)
        if (f[i] != 0.0 && cond1.gamma()[i] != cond2.gamma()[i])
            throw InvalidArgument(
                "alessandrini_decomposition_residual: conductivities must agree on "
                "the support of f");

    const double lhs = b_gamma(kw, cond1, uf1.u, f) - b_gamma(kw, cond2, uf2.u, f);

    const GridFunction a1u1 = pointwise_mul(cond1.sqrt_gamma(), uf1.u);
    const GridFunction a2u2 = pointwise_mul(cond2.sqrt_gamma(), uf2.u);
    const GridFunction a1f = pointwise_mul(cond1.sqrt_gamma(), f);
    const GridFunction a1f2 = pointwise_mul(a1f, f);  // gamma1^{1/2} f^2 nodally
    const GridFunction dm = sub(cond1.deviation(), cond2.deviation());

    const double rhs = b_one(kw, sub(a1u1, a2u2), a1f) - b_one(kw, dm, a1f2);
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

PolarizationPair make_polarization_pair(const GridSpec& spec,
                                        const std::vector<long>& window,
                                        const GridFunction& f, int cutoff_cells) {
    std::vector<long> support;
    for (long i = 0; i < f.size(); ++i)
        if (f[i] != 0.0) support.push_back(i);
    if (support.empty())
        throw InvalidArgument("make_polarization_pair: f vanishes identically");
    for (long i : support)
        if (!std::binary_search(window.begin(), window.end(), i))
            throw GeometryError("make_polarization_pair: f not supported in window");

    // indicator of the dilated support, mollified, then pinned to exactly 1
    // on the support so the nodal identity is exact; the mollified collar
    // must stay inside `window`.
    for (long i : dilate(spec, support, 2 * cutoff_cells))
        if (!std::binary_search(window.begin(), window.end(), i))
            throw GeometryError(
                "make_polarization_pair: cutoff collar escapes the window; shrink "
                "cutoff_cells or enlarge the window");
    GridFunction ind(spec);
    for (long i : dilate(spec, support, cutoff_cells)) ind[i] = 1.0;
    GridFunction phi = mollify(spec, ind, cutoff_cells * spec.spacing());
    for (long i : support) phi[i] = 1.0;

    PolarizationPair out;
    out.phi = phi;
    out.g = sub(phi, f);
    return out;
}

}  // namespace fracond
