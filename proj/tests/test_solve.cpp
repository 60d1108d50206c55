#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <random>

#include "fracond/solve.hpp"
#include "test_support.hpp"

using namespace fracond;
using fracond::testing::random_field;
using fracond::testing::random_gamma;

namespace {

RegionLayout layout_1d(const GridSpec& spec) {
    return define_regions(spec, Box::interval(-0.5, 0.5), Box::interval(-0.9, -0.7),
                          Box::interval(0.7, 0.9), std::nullopt);
}

GridFunction window_bump(const GridSpec& spec, const RegionLayout& lay) {
    GridFunction f(spec);
    for (long i : lay.w1) {
        const double x = spec.node(i)[0];
        const double t = (x + 0.8) / 0.1;
        if (t * t < 1.0) f[i] = std::exp(-1.0 / (1.0 - t * t));
    }
    return f;
}

}  // namespace

TEST_CASE("zero exterior data yields the zero solution") {
    GridSpec spec = build_grid(1, 1.0, 32);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    Conductivity one = Conductivity::constant_one(spec);
    Solution sol = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, one, lay, GridFunction(spec)),
        1e-12);
    CHECK(norms(sol.u).linf == 0.0);
}

TEST_CASE("exterior data must vanish on Omega") {
    GridSpec spec = build_grid(1, 1.0, 32);
    RegionLayout lay = layout_1d(spec);
    Conductivity one = Conductivity::constant_one(spec);
    GridFunction f(spec);
    f[lay.omega.front()] = 1.0;
    CHECK_THROWS_AS(make_dirichlet_problem(FormKind::conductivity, one, lay, f),
                    InvalidArgument);
}

TEST_CASE("discrete maximum principle for the trivial conductivity") {
    GridSpec spec = build_grid(1, 1.0, 48);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.4));
    RegionLayout lay = layout_1d(spec);
    Conductivity one = Conductivity::constant_one(spec);
    GridFunction f(spec);
    f[lay.w1[1]] = 1.0;
    Solution sol = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, one, lay, f), 1e-12);
    for (long i = 0; i < sol.u.size(); ++i) {
        CHECK(sol.u[i] >= -1e-13);
        CHECK(sol.u[i] <= 1.0 + 1e-13);
    }
}

TEST_CASE("solver agrees with a dense full-system oracle") {
    std::mt19937_64 rng(71);
    GridSpec spec = build_grid(1, 1.0, 32);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    Conductivity c = random_gamma(spec, rng);
    GridFunction f(spec);
    for (long i : lay.exterior) f[i] = std::sin(3.0 * spec.node(i)[0]);

    Solution sol = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, c, lay, f), 1e-12);

    // independent route: assemble the full form matrix, overwrite exterior
    // rows with identity, solve the square system by full-pivot LU
    const long n = spec.node_count();
    FormMatrix fm = assemble_form_matrix(w, c, FormKind::conductivity);
    Eigen::MatrixXd a = fm.a;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (long i : lay.exterior) {
        a.row(i).setZero();
        a(i, i) = 1.0;
        rhs(i) = f[i];
    }
    Eigen::VectorXd x = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(rhs);
    double diff = 0.0;
    for (long i = 0; i < n; ++i) diff = std::max(diff, std::abs(sol.u[i] - x(i)));
    CHECK(diff <= 1e-10);

    // exterior values are imposed strongly, not solved for
    for (long i : lay.exterior) CHECK(sol.u[i] == f[i]);
}

TEST_CASE("solution map is linear and unique across solver paths") {
    std::mt19937_64 rng(73);
    GridSpec spec = build_grid(1, 1.0, 64);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.3));
    RegionLayout lay = layout_1d(spec);
    Conductivity c = random_gamma(spec, rng);

    GridFunction f(spec), g(spec);
    for (long i : lay.exterior) {
        f[i] = std::cos(2.0 * spec.node(i)[0]);
        g[i] = 0.5 * spec.node(i)[0];
    }
    Solution uf = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, c, lay, f), 1e-13);
    Solution ug = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, c, lay, g), 1e-13);
    Solution ufg = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, c, lay, add(f, g)), 1e-13);
    CHECK(norms(sub(ufg.u, add(uf.u, ug.u))).linf <= 1e-10);

    // CG from two different starting points lands on the Cholesky answer
    DirichletProblem p = make_dirichlet_problem(FormKind::conductivity, c, lay, f);
    SolveOptions o1;
    o1.force_cg = true;
    o1.tol = 1e-13;
    Solution cg1 = dirichlet_solve(w, p, o1);
    SolveOptions o2 = o1;
    o2.initial_guess = random_field(spec, rng);
    for (long i : lay.exterior) (*o2.initial_guess)[i] = 0.0;
    Solution cg2 = dirichlet_solve(w, p, o2);
    CHECK(norms(sub(cg1.u, cg2.u)).linf <= 1e-10);
    CHECK(norms(sub(cg1.u, uf.u)).linf <= 1e-10);
    CHECK(cg1.diag.method == "cg");
    CHECK(uf.diag.method == "cholesky");
}

TEST_CASE("conductivity and Schroedinger solves correspond through the reduction") {
    std::mt19937_64 rng(79);
    GridSpec spec = build_grid(1, 1.0, 64);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    const double tol = 1e-12;
    for (int t = 0; t < 3; ++t) {
        Conductivity c = random_gamma(spec, rng);
        GridFunction g = window_bump(spec, lay);
        Solution u = dirichlet_solve(
            w, make_dirichlet_problem(FormKind::conductivity, c, lay, g), tol);
        GridFunction f = pointwise_mul(c.sqrt_gamma(), g);
        Solution v = dirichlet_solve(
            w, make_dirichlet_problem(FormKind::schrodinger, c, lay, f), tol);
        const double r =
            norms(sub(pointwise_mul(c.sqrt_gamma(), u.u), v.u)).linf;
        CHECK(r <= 10.0 * tol);
    }
}

TEST_CASE("Schroedinger solves enforce the subcritical range") {
    GridSpec spec = build_grid(1, 1.0, 32);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.6));
    RegionLayout lay = layout_1d(spec);
    Conductivity one = Conductivity::constant_one(spec);
    DirichletProblem p =
        make_dirichlet_problem(FormKind::schrodinger, one, lay, GridFunction(spec));
    CHECK_THROWS_AS(dirichlet_solve(w, p, 1e-12), InvalidArgument);
}

TEST_CASE("Schroedinger block stays definite even for violent conductivities") {
    // discretely the Schroedinger energy of v equals the conductivity energy
    // of gamma^{-1/2} v, so the interior block inherits definiteness from
    // ellipticity no matter how rough gamma is; the solve must succeed, and
    // the reduction must still hold
    GridSpec spec = build_grid(1, 1.0, 32);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    GridFunction g(spec, 1.0);
    g[10] = 4000.0;
    g[11] = 1e-4;
    g[17] = 250.0;
    Conductivity c = Conductivity::from_field(g);

    GridFunction ext = window_bump(spec, lay);
    Solution u = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::conductivity, c, lay, ext), 1e-13);
    GridFunction f = pointwise_mul(c.sqrt_gamma(), ext);
    Solution v = dirichlet_solve(
        w, make_dirichlet_problem(FormKind::schrodinger, c, lay, f), 1e-13);
    CHECK(norms(sub(pointwise_mul(c.sqrt_gamma(), u.u), v.u)).linf <= 1e-9);
}

TEST_CASE("elliptic estimate check: zero data, scaling invariance, refinement") {
    std::vector<double> ratios;
    for (int n : {32, 64, 128}) {
        GridSpec spec = build_grid(1, 1.0, n);
        KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
        RegionLayout lay = layout_1d(spec);
        Conductivity one = Conductivity::constant_one(spec);

        GridFunction f = window_bump(spec, lay);
        DirichletProblem p = make_dirichlet_problem(FormKind::conductivity, one, lay, f);
        Solution sol = dirichlet_solve(w, p, 1e-12);
        EllipticCheck ec = elliptic_estimate_check(w, p, sol);
        ratios.push_back(ec.ratio());

        DirichletProblem p2 =
            make_dirichlet_problem(FormKind::conductivity, one, lay, scale(f, 2.0));
        Solution sol2 = dirichlet_solve(w, p2, 1e-12);
        EllipticCheck ec2 = elliptic_estimate_check(w, p2, sol2);
        CHECK(ec2.ratio() == doctest::Approx(ec.ratio()).epsilon(1e-9));

        GridFunction zero(spec);
        DirichletProblem pz =
            make_dirichlet_problem(FormKind::conductivity, one, lay, zero);
        Solution solz = dirichlet_solve(w, pz, 1e-12);
        CHECK(elliptic_estimate_check(w, pz, solz).ratio() == 0.0);
    }
    // geometry-dependent constant stays bounded across refinements
    for (double r : ratios) CHECK(r <= 2.0 * ratios.front() + 1.0);
}

TEST_CASE("elliptic estimate check rejects windows touching Omega") {
    GridSpec spec = build_grid(1, 1.0, 64);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.45));
    RegionLayout lay = layout_1d(spec);
    Conductivity one = Conductivity::constant_one(spec);
    GridFunction f(spec);
    // first exterior node right of Omega: zero cells of separation
    for (long i : lay.exterior)
        if (spec.node(i)[0] > 0.5) {
            f[i] = 1.0;
            break;
        }
    DirichletProblem p = make_dirichlet_problem(FormKind::conductivity, one, lay, f);
    Solution sol = dirichlet_solve(w, p, 1e-12);
    CHECK_THROWS_AS(elliptic_estimate_check(w, p, sol), GeometryError);
}

TEST_CASE("poincare constant: positive, monotone in the domain, grid stable") {
    GridSpec spec = build_grid(1, 1.0, 128);
    KernelWeights w = build_weights(spec, make_frac_params(1, 0.5));
    RegionLayout big = layout_1d(spec);
    RegionLayout small =
        define_regions(spec, Box::interval(-0.25, 0.25), Box::interval(-0.9, -0.7),
                       Box::interval(0.7, 0.9), std::nullopt);
    const double c_big = poincare_constant(w, big);
    const double c_small = poincare_constant(w, small);
    CHECK(c_big > 0.0);
    CHECK(c_small <= c_big);

    // refinement study: the constant converges at first order, so the
    // refinement differences shrink by about half per doubling; at s = 0.3
    // the N = 128/256 values already agree to three digits
    for (double s : {0.5, 0.3}) {
        std::vector<double> c;
        for (int n : {128, 256, 512}) {
            GridSpec sp = build_grid(1, 1.0, n);
            KernelWeights ws = build_weights(sp, make_frac_params(1, s));
            c.push_back(poincare_constant(ws, layout_1d(sp)));
        }
        const double d01 = std::abs(c[1] - c[0]) / c[1];
        const double d12 = std::abs(c[2] - c[1]) / c[2];
        CHECK(d12 < d01);
        CHECK(d01 <= (s == 0.5 ? 5e-3 : 1e-3));
        CHECK(d12 <= (s == 0.5 ? 2e-3 : 5e-4));
    }
}
