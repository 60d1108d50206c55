#include "fracond/counterex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracond {

namespace {

std::vector<long> support_of(const GridFunction& u) {
    std::vector<long> s;
    for (long i = 0; i < u.size(); ++i)
        if (u[i] != 0.0) s.push_back(i);
    return s;
}

bool touches_ring(const GridSpec& spec, const std::vector<long>& nodes) {
    const int n = spec.nodes_per_axis;
    for (long i : nodes) {
        auto p = spec.unflatten(i);
        if (p[0] == 0 || p[0] == n - 1) return true;
        if (spec.dim == 2 && (p[1] == 0 || p[1] == n - 1)) return true;
    }
    return false;
}

void check_disjoint_from(const std::vector<long>& a, const std::vector<long>& b,
                         const char* what) {
    for (long i : a)
        if (std::binary_search(b.begin(), b.end(), i))
            throw GeometryError(std::string("build_counterexample: cutoff support "
                                            "reaches ") + what);
}

}  // namespace

CounterexamplePair build_counterexample(const KernelWeights& kw,
                                        const RegionLayout& layout,
                                        const CounterexampleOptions& opts) {
    kw.params().require_subcritical("build_counterexample");
    const GridSpec& spec = kw.spec();
    check_same_grid(spec, layout.spec, "build_counterexample");
    if (layout.omega_small.empty())
        throw GeometryError("build_counterexample: omega_small region is empty");
    if (opts.collar_cells < 1)
        throw InvalidArgument("build_counterexample: collar_cells must be >= 1");

    // smoothed cutoff: indicator of the dilated omega_small, mollified, then
    // pinned to 1 on omega_small itself
    GridFunction ind(spec);
    for (long i : dilate(spec, layout.omega_small, opts.collar_cells)) ind[i] = 1.0;
    GridFunction eta = mollify(spec, ind, opts.collar_cells * spec.spacing());
    for (long i : layout.omega_small) eta[i] = 1.0;

    const std::vector<long> eta_supp = support_of(eta);
    check_disjoint_from(eta_supp, layout.omega, "Omega");
    check_disjoint_from(eta_supp, layout.w1, "W1");
    check_disjoint_from(eta_supp, layout.w2, "W2");
    {
        std::vector<long> w12 = layout.w1;
        w12.insert(w12.end(), layout.w2.begin(), layout.w2.end());
        std::sort(w12.begin(), w12.end());
        if (lattice_gap(spec, eta_supp, w12) < 2)
            throw GeometryError(
                "build_counterexample: cutoff support must keep one empty cell "
                "away from W1 and W2");
    }
    if (touches_ring(spec, eta_supp))
        throw GeometryError(
            "build_counterexample: cutoff support touches the outermost cell ring");

    Conductivity one = Conductivity::constant_one(spec);
    GridFunction mtilde;
    if (opts.mode == CounterexampleMode::direct) {
        DirichletProblem p = make_dirichlet_problem(FormKind::conductivity, one,
                                                    layout, eta);
        mtilde = dirichlet_solve(kw, p, opts.tol).u;
    } else {
        // enlarged-domain solve followed by mollification; the smoothing
        // radius is half the dilation so the mollified field stays
        // s-harmonic well inside Omega
        RegionLayout enlarged;
        enlarged.spec = spec;
        enlarged.omega = dilate(spec, layout.omega, opts.omega_dilation_cells);
        check_disjoint_from(eta_supp, enlarged.omega, "the dilated Omega");
        enlarged.is_omega.assign(static_cast<std::size_t>(spec.node_count()), 0);
        for (long i : enlarged.omega) enlarged.is_omega[static_cast<std::size_t>(i)] = 1;
        for (long i = 0; i < spec.node_count(); ++i)
            if (!enlarged.is_omega[static_cast<std::size_t>(i)])
                enlarged.exterior.push_back(i);
        DirichletProblem p = make_dirichlet_problem(FormKind::conductivity, one,
                                                    enlarged, eta);
        GridFunction raw = dirichlet_solve(kw, p, opts.tol).u;
        const double radius =
            std::max(1, opts.omega_dilation_cells / 2) * spec.spacing();
        mtilde = mollify(spec, raw, radius);
    }

    const double sup = norms(mtilde).linf;
    if (!(sup > 0.0))
        throw SolverError("build_counterexample: s-harmonic extension vanished");

    CounterexamplePair pair;
    pair.eta = eta;
    pair.collar_cells = opts.collar_cells;
    pair.scale_c = 0.5 / sup;
    pair.m1 = GridFunction(spec);
    for (long i = 0; i < pair.m1.size(); ++i) pair.m1[i] = 0.5 * (mtilde[i] / sup);

    for (long i : layout.w1)
        if (pair.m1[i] != 0.0)
            throw GeometryError("build_counterexample: m1 leaks onto W1");
    for (long i : layout.w2)
        if (pair.m1[i] != 0.0)
            throw GeometryError("build_counterexample: m1 leaks onto W2");

    GridFunction gamma1(spec);
    for (long i = 0; i < gamma1.size(); ++i) {
        const double a = 1.0 + pair.m1[i];
        gamma1[i] = a * a;
    }
    pair.cond1 = Conductivity::from_field(gamma1);
    pair.cond2 = one;
    return pair;
}

NonuniquenessReport verify_nonuniqueness(const CounterexamplePair& pair,
                                         const KernelWeights& kw,
                                         const RegionLayout& layout, double tol,
                                         int n_relation_basis) {
    DnMatrix dn1 = assemble_dn(kw, pair.cond1, layout, tol);
    DnMatrix dn2 = assemble_dn(kw, pair.cond2, layout, tol);

    NonuniquenessReport rep;
    rep.dn_symmetry_defect = std::max(dn1.symmetry_defect, dn2.symmetry_defect);
    rep.r_dn = dn_partial_gap(dn1, dn2, layout);

    DnBlock same1 = restrict_block(dn1, layout.w1, layout.w1);
    DnBlock same2 = restrict_block(dn2, layout.w1, layout.w1);
    const double same_scale = same1.m.cwiseAbs().maxCoeff();
    rep.w1w1_diff = (same1.m - same2.m).cwiseAbs().maxCoeff() /
                    (same_scale > 0.0 ? same_scale : 1.0);

    rep.d_gamma = max_abs_on(sub(pair.cond1.gamma(), pair.cond2.gamma()), layout.omega);

    const int nb = std::max(1, std::min<int>(n_relation_basis,
                                             static_cast<int>(layout.w1.size())));
    for (int k = 0; k < nb; ++k) {
        const std::size_t pick = layout.w1.size() * static_cast<std::size_t>(k) /
                                 static_cast<std::size_t>(nb);
        GridFunction f(kw.spec());
        f[layout.w1[pick]] = 1.0;
        RelationReport rel =
            relation_of_solutions_check(kw, pair.cond1, pair.cond2, layout, f, tol);
        rep.r_sol = std::max(rep.r_sol, rel.sup_diff);
    }
    return rep;
}

double invariance_of_data_residual(const CounterexamplePair& pair,
                                   const KernelWeights& kw,
                                   const RegionLayout& layout, double tol) {
    (void)tol;
    const GridSpec& spec = kw.spec();
    GridFunction m = sub(pair.m1, pair.cond2.deviation());

    // interior weak-form residual of (-Delta)^s m + q_{gamma2} m against the
    // interior nodal basis, normalized by the exterior driving term
    GridFunction res = apply_form(kw, pair.cond2, FormKind::schrodinger, m);
    GridFunction m_ext(spec);
    for (long i : layout.exterior) m_ext[i] = m[i];
    GridFunction drive = apply_form(kw, pair.cond2, FormKind::schrodinger, m_ext);

    const double r = max_abs_on(res, layout.omega);
    const double d = max_abs_on(drive, layout.omega);
    if (d == 0.0) return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r / d;
}

}  // namespace fracond
