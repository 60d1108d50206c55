// Acceptance suite: every release criterion of the laboratory, one pass/fail
// line each, nonzero exit if any fails. Thresholds are fixed here, not
// configurable.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "fracond/counterex.hpp"
#include "fracond/extdet.hpp"
#include "test_support.hpp"

using namespace fracond;
using fracond::testing::random_field;
using fracond::testing::random_gamma;

namespace {

int g_failures = 0;

void report(const char* name, bool pass, double value, const char* cmp,
            double threshold, double seconds) {
    std::printf("[%s] %-38s %.3e %s %.3e  (%.2fs)\n", pass ? "PASS" : "FAIL", name,
                value, cmp, threshold, seconds);
    if (!pass) ++g_failures;
}

struct Timer {
    double t0 = omp_get_wtime();
    double elapsed() const { return omp_get_wtime() - t0; }
};

RegionLayout layout_1d(const GridSpec& spec) {
    return define_regions(spec, Box::interval(-0.5, 0.5), Box::interval(-0.9, -0.7),
                          Box::interval(0.7, 0.9), std::nullopt);
}

GridFunction w1_bump(const GridSpec& spec, const RegionLayout& lay) {
    GridFunction f(spec);
    for (long i : lay.w1) {
        auto p = spec.node(i);
        const double tx = (p[0] + 0.8) / 0.1;
        double t2 = tx * tx;
        if (spec.dim == 2) {
            const double ty = p[1] / 0.5;
            t2 += ty * ty;
        }
        if (t2 < 1.0) f[i] = std::exp(-1.0 / (1.0 - t2));
    }
    return f;
}

// 1. Discrete Liouville identity on random data, 1D and 2D.
void criterion_liouville() {
    Timer timer;
    std::mt19937_64 rng(2024);
    double worst = 0.0;

    GridSpec s1 = build_grid(1, 1.0, 64);
    KernelWeights w1 = build_weights(s1, make_frac_params(1, 0.45));
    for (int t = 0; t < 50; ++t) {
        Conductivity c = random_gamma(s1, rng);
        worst = std::max(worst, liouville_residual(w1, c, random_field(s1, rng),
                                                   random_field(s1, rng)));
    }
    GridSpec s2 = build_grid(2, 1.0, 32);
    KernelWeights w2 = build_weights(s2, make_frac_params(2, 0.75));
    for (int t = 0; t < 50; ++t) {
        Conductivity c = random_gamma(s2, rng);
        worst = std::max(worst, liouville_residual(w2, c, random_field(s2, rng),
                                                   random_field(s2, rng)));
    }
    report("1 liouville identity", worst <= 1e-12, worst, "<=", 1e-12,
           timer.elapsed());
}

// 2. Solution correspondence under the reduction for random elliptic gamma.
void criterion_correspondence() {
    Timer timer;
    std::mt19937_64 rng(2025);
    GridSpec spec = build_grid(1, 1.0, 64);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    GridFunction g = w1_bump(spec, lay);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        Conductivity c = random_gamma(spec, rng);
        Solution u = dirichlet_solve(
            w, make_dirichlet_problem(FormKind::conductivity, c, lay, g), 1e-12);
        Solution v = dirichlet_solve(
            w,
            make_dirichlet_problem(FormKind::schrodinger, c, lay,
                                   pointwise_mul(c.sqrt_gamma(), g)),
            1e-12);
        worst = std::max(
            worst, norms(sub(pointwise_mul(c.sqrt_gamma(), u.u), v.u)).linf);
    }
    report("2 solution correspondence", worst <= 1e-10, worst, "<=", 1e-10,
           timer.elapsed());
}

// 3. DN symmetry and the Alessandrini identity on full 1D assemblies.
void criterion_dn_alessandrini() {
    Timer timer;
    std::mt19937_64 rng(2026);
    GridSpec spec = build_grid(1, 1.0, 32);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    Conductivity c1 = random_gamma(spec, rng);
    Conductivity c2 = random_gamma(spec, rng);
    DnMatrix dn1 = assemble_dn(w, c1, lay, 1e-12);
    DnMatrix dn2 = assemble_dn(w, c2, lay, 1e-12);

    double worst = std::max(dn1.symmetry_defect, dn2.symmetry_defect);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        GridFunction f(spec), g(spec);
        for (long i : lay.exterior) {
            f[i] = unif(rng);
            g[i] = unif(rng);
        }
        Solution uf1 = dirichlet_solve(
            w, make_dirichlet_problem(FormKind::conductivity, c1, lay, f), 1e-12);
        Solution ug2 = dirichlet_solve(
            w, make_dirichlet_problem(FormKind::conductivity, c2, lay, g), 1e-12);
        worst = std::max(worst,
                         alessandrini_gap(w, c1, c2, dn1, dn2, f, g, uf1, ug2));
    }
    report("3 dn symmetry + alessandrini", worst <= 1e-10, worst, "<=", 1e-10,
           timer.elapsed());
}

// 4. Counterexample pairs: private data agrees, the pair still differs, and
//    same-window data tells them apart.
void criterion_counterexample() {
    Timer timer;
    double worst_rdn = 0.0, worst_dg = 1e300, worst_same = 1e300;

    auto run = [&](int dim, int n, double s) {
        GridSpec spec = build_grid(dim, 1.0, n);
        KernelWeights w = build_weights(spec, make_frac_params(dim, s));
        RegionLayout lay =
            dim == 1 ? define_regions(spec, Box::interval(-0.4, 0.4),
                                      Box::interval(-0.95, -0.75),
                                      Box::interval(0.75, 0.95),
                                      Box::interval(0.5, 0.65))
                     : define_regions(spec, Box::rect(-0.35, 0.35, -0.35, 0.35),
                                      Box::rect(-0.95, -0.7, -0.35, 0.35),
                                      Box::rect(0.7, 0.95, -0.35, 0.35),
                                      Box::rect(-0.3, 0.3, -0.75, -0.5));
        CounterexampleOptions opts;
        opts.collar_cells = dim == 1 ? 2 : 1;
        CounterexamplePair pair = build_counterexample(w, lay, opts);
        NonuniquenessReport rep = verify_nonuniqueness(pair, w, lay, 1e-12, 1);
        worst_rdn = std::max(worst_rdn, rep.r_dn);
        worst_dg = std::min(worst_dg, rep.d_gamma);
        worst_same = std::min(worst_same, rep.w1w1_diff);
    };
    run(1, 128, 0.3);
    run(1, 128, 0.45);
    run(2, 48, 0.3);
    run(2, 48, 0.5);
    run(2, 48, 0.75);

    const double t = timer.elapsed();
    report("4a counterexample dn agreement", worst_rdn <= 1e-8, worst_rdn, "<=", 1e-8,
           t);
    report("4b counterexample gamma gap", worst_dg >= 0.05, worst_dg, ">=", 0.05, t);
    report("4c same-window distinguishable", worst_same >= 1e-4, worst_same, ">=",
           1e-4, t);
}

// 5. Relation of solutions over a W1 basis for the counterexample pair.
void criterion_relation() {
    Timer timer;
    GridSpec spec = build_grid(1, 1.0, 128);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.3));
    RegionLayout lay =
        define_regions(spec, Box::interval(-0.4, 0.4), Box::interval(-0.95, -0.75),
                       Box::interval(0.75, 0.95), Box::interval(0.5, 0.65));
    CounterexamplePair pair = build_counterexample(w, lay, {});
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        GridFunction f(spec);
        f[lay.w1[lay.w1.size() * static_cast<std::size_t>(k) / 5]] = 1.0;
        RelationReport rel =
            relation_of_solutions_check(w, pair.cond1, pair.cond2, lay, f, 1e-12);
        worst = std::max(worst, rel.sup_diff);
    }
    report("5 relation of solutions", worst <= 1e-8, worst, "<=", 1e-8,
           timer.elapsed());
}

// 6. Exterior reconstruction of gamma(x0) = 4 from concentrating data.
void criterion_reconstruction() {
    Timer timer;
    GridSpec spec = build_grid(1, 1.0, 256);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = define_regions(spec, Box::interval(-0.7, 0.1),
                                      Box::interval(0.3, 0.9),
                                      Box::interval(-0.95, -0.8), std::nullopt);
    GridFunction g(spec, 1.0);
    for (long i = 0; i < g.size(); ++i) {
        const double x = spec.node(i)[0];
        double t = 0.0;
        if (x < 0.3) t = (0.3 - x) / 0.08;
        if (x > 0.9) t = (x - 0.9) / 0.08;
        if (t < 1.0) {
            const double a = t <= 0.0 ? 1.0
                                      : std::exp(-1.0 / (1.0 - t)) /
                                            (std::exp(-1.0 / (1.0 - t)) +
                                             std::exp(-1.0 / t));
            g[i] = 1.0 + 3.0 * a;
        }
    }
    Conductivity cond = Conductivity::from_field(g);
    DnMatrix dn = assemble_dn(w, cond, lay, 1e-12);
    ConcentratingSequence seq = build_sequence(spec, lay.w1, w, {0.6, 0.0}, 0.25, 3);
    std::vector<double> trace = reconstruct_point(dn, seq);

    const double rel = std::abs(trace.back() - 4.0) / 4.0;
    bool monotone = true;
    for (std::size_t k = trace.size() - 3; k + 1 < trace.size(); ++k)
        if (std::abs(trace[k + 1] - 4.0) > std::abs(trace[k] - 4.0)) monotone = false;
    const double t = timer.elapsed();
    report("6a reconstruction accuracy", rel <= 0.10, rel, "<=", 0.10, t);
    report("6b reconstruction trend", monotone, monotone ? 1.0 : 0.0, ">=", 1.0, t);
}

// 7. Stability inequality with 5% slack at the finest of two grids.
void criterion_stability() {
    Timer timer;
    bool holds = true;
    double worst_ratio = 0.0;
    for (int n : {128, 256}) {
        GridSpec spec = build_grid(1, 1.0, n);
        KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
        RegionLayout lay = define_regions(spec, Box::interval(-0.7, 0.1),
                                          Box::interval(0.3, 0.9),
                                          Box::interval(-0.95, -0.8), std::nullopt);
        GridFunction base(spec, 1.0);
        for (long i = 0; i < base.size(); ++i) {
            const double x = spec.node(i)[0];
            const double t = (x - 0.6) / 0.25;
            if (t * t < 1.0) base[i] += std::exp(-1.0 / (1.0 - t * t));
        }
        Conductivity c1 = Conductivity::from_field(base);
        for (double scale_dev : {1.2, 1.5, 0.7}) {
            GridFunction g2(spec);
            for (long i = 0; i < g2.size(); ++i)
                g2[i] = 1.0 + scale_dev * (base[i] - 1.0);
            Conductivity c2 = Conductivity::from_field(g2);
            DnMatrix dn1 = assemble_dn(w, c1, lay, 1e-12);
            DnMatrix dn2 = assemble_dn(w, c2, lay, 1e-12);
            StabilityReport rep = stability_compare(dn1, dn2, c1, c2, lay, w, lay.w1);
            if (n == 256) {
                holds = holds && rep.holds(0.05);
                worst_ratio = std::max(worst_ratio, rep.lhs / rep.rhs);
            }
        }
    }
    report("7 stability inequality", holds, worst_ratio, "<=", 1.05,
           timer.elapsed());
}

// 8. Kernel oracle: the Getoor profile has unit image, errors shrink.
void criterion_getoor() {
    Timer timer;
    std::vector<double> errs;
    for (int n : {64, 128, 256, 512}) {
        GridSpec spec = build_grid(1, 2.0, n);
        KernelWeights w = build_weights(spec, make_frac_params(1, 0.5));
        GridFunction u(spec);
        for (long i = 0; i < u.size(); ++i) {
            const double x = spec.node(i)[0];
            if (x * x < 1.0) u[i] = std::sqrt(1.0 - x * x);
        }
        GridFunction au = apply_frac_laplacian(w, u);
        double err = 0.0;
        for (long i = 0; i < u.size(); ++i)
            if (std::abs(spec.node(i)[0]) <= 0.9)
                err = std::max(err, std::abs(au[i] - 1.0));
        errs.push_back(err);
    }
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < errs.size(); ++k)
        if (errs[k + 1] >= errs[k]) monotone = false;
    const double t = timer.elapsed();
    report("8a getoor accuracy at N=512", errs.back() <= 0.05, errs.back(), "<=",
           0.05, t);
    report("8b getoor errors monotone", monotone, monotone ? 1.0 : 0.0, ">=", 1.0, t);
}

// 9. Brute-force equivalence of operator application and form evaluation.
void criterion_bruteforce() {
    Timer timer;
    std::mt19937_64 rng(2027);
    double worst = 0.0;
    for (auto [dim, n] : {std::pair{1, 8}, {1, 64}, {1, 128}, {1, 200},
                          {2, 8}, {2, 12}, {2, 14}}) {
        GridSpec spec = build_grid(dim, 1.0, n);
        KernelWeights w = build_weights(spec, make_frac_params(dim, 0.45));
        Conductivity c = random_gamma(spec, rng);
        GridFunction u = random_field(spec, rng);
        GridFunction v = random_field(spec, rng);

        GridFunction fast = apply_frac_laplacian(w, u);
        GridFunction slow = fracond::testing::apply_oracle(w, u);
        worst = std::max(worst, norms(sub(fast, slow)).linf /
                                    std::max(1.0, norms(fast).linf));

        const double f1 = b_gamma(w, c, u, v);
        const double f2 = fracond::testing::b_gamma_oracle(w, c.sqrt_gamma(), u, v);
        worst = std::max(worst, std::abs(f1 - f2) / std::max(1.0, std::abs(f1)));
    }
    report("9 brute-force equivalence", worst <= 1e-12, worst, "<=", 1e-12,
           timer.elapsed());
}

}  // namespace

int main() {
    const double t0 = omp_get_wtime();
    criterion_liouville();
    criterion_correspondence();
    criterion_dn_alessandrini();
    criterion_counterexample();
    criterion_relation();
    criterion_reconstruction();
    criterion_stability();
    criterion_getoor();
    criterion_bruteforce();
    std::printf("%s (%d failure%s, %.1fs total)\n",
                g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
                g_failures, g_failures == 1 ? "" : "s", omp_get_wtime() - t0);
    return g_failures == 0 ? 0 : 1;
}
