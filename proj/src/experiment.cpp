#include "fracond/experiment.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include <json.hpp>

#include "fracond/extdet.hpp"
#include "fracond/gridio.hpp"

namespace fracond {

bool ExperimentReport::all_pass() const {
    for (const auto& c : criteria)
        if (!c.pass) return false;
    return !criteria.empty();
}

namespace {

using nlohmann::json;

struct Context {
    const ExperimentConfig& cfg;
    GridSpec spec;
    RegionLayout layout;
    KernelWeights weights;
    ExperimentReport& rep;
    std::filesystem::path out;
};

void add_le(ExperimentReport& rep, const std::string& name, double value, double thr) {
    rep.criteria.push_back({name, value <= thr, value, thr, "<="});
}

void add_ge(ExperimentReport& rep, const std::string& name, double value, double thr) {
    rep.criteria.push_back({name, value >= thr, value, thr, ">="});
}

std::string artifact(Context& ctx, const std::string& name) {
    ctx.rep.artifacts.push_back((ctx.out / name).string());
    return (ctx.out / name).string();
}

// smooth bump over a box, scaled to vanish at the box faces
GridFunction box_bump(const GridSpec& spec, const Box& box,
                      const std::vector<long>& restrict_to) {
    GridFunction f(spec);
    for (long i : restrict_to) {
        auto p = spec.node(i);
        double t2 = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            const auto dd = static_cast<std::size_t>(d);
            const double mid = 0.5 * (box.lo[dd] + box.hi[dd]);
            const double half = 0.5 * (box.hi[dd] - box.lo[dd]);
            const double t = (p[dd] - mid) / half;
            t2 += t * t;
        }
        if (t2 < 1.0) f[i] = std::exp(-1.0 / (1.0 - t2));
    }
    return f;
}

GridFunction random_rough_gamma(const GridSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.5, 2.0);
    GridFunction g(spec, 1.0);
    const int n = spec.nodes_per_axis;
    for (long i = 0; i < g.size(); ++i) {
        auto p = spec.unflatten(i);
        const bool ring = p[0] == 0 || p[0] == n - 1 ||
                          (spec.dim == 2 && (p[1] == 0 || p[1] == n - 1));
        if (!ring) g[i] = unif(rng);
    }
    return g;
}

GridFunction random_field(const GridSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    GridFunction u(spec);
    for (long i = 0; i < u.size(); ++i) u[i] = unif(rng);
    return u;
}

void write_solve_diag(const SolveDiagnostics& d, const std::filesystem::path& path) {
    json j;
    j["method"] = d.method;
    j["iterations"] = d.iterations;
    j["rel_residual"] = d.rel_residual;
    j["wall_seconds"] = d.wall_seconds;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

void run_forward_solve(Context& ctx) {
    Conductivity cond = make_conductivity(ctx.cfg, ctx.spec);
    GridFunction f = box_bump(ctx.spec, ctx.cfg.w1_box, ctx.layout.w1);
    DirichletProblem p =
        make_dirichlet_problem(FormKind::conductivity, cond, ctx.layout, f);
    Solution sol = dirichlet_solve(ctx.weights, p, ctx.cfg.tol);
    write_csv(sol.u, artifact(ctx, "solution.csv"));
    write_binary(sol.u, artifact(ctx, "solution.bin"));
    write_solve_diag(sol.diag, artifact(ctx, "solve_diag.json"));

    ctx.rep.metrics["rel_residual"] = sol.diag.rel_residual;
    ctx.rep.metrics["u_linf"] = norms(sol.u).linf;
    ctx.rep.metrics["u_l2"] = norms(sol.u).l2;
    if (lattice_gap(ctx.spec, ctx.layout.w1, ctx.layout.omega) >= 2) {
        EllipticCheck ec = elliptic_estimate_check(ctx.weights, p, sol);
        ctx.rep.metrics["elliptic_ratio"] = ec.ratio();
    }
    add_le(ctx.rep, "solver_rel_residual", sol.diag.rel_residual, ctx.cfg.tol);
}

void run_dn_assemble(Context& ctx) {
    Conductivity cond = make_conductivity(ctx.cfg, ctx.spec);
    DnMatrix dn = assemble_dn(ctx.weights, cond, ctx.layout, ctx.cfg.tol);
    write_dn_csv(dn, artifact(ctx, "dn.csv"));
    ctx.rep.metrics["n_exterior"] = static_cast<double>(dn.exterior.size());
    ctx.rep.metrics["symmetry_defect"] = dn.symmetry_defect;
    add_le(ctx.rep, "dn_symmetry_defect", dn.symmetry_defect, 1e-10);
}

void run_verify_identities(Context& ctx) {
    std::mt19937_64 rng(ctx.cfg.seed);
    double liouville_max = 0.0, correspondence_max = 0.0;
    for (int t = 0; t < ctx.cfg.trials; ++t) {
        Conductivity cond = Conductivity::from_field(random_rough_gamma(ctx.spec, rng));
        GridFunction u = random_field(ctx.spec, rng);
        GridFunction phi = random_field(ctx.spec, rng);
        liouville_max = std::max(liouville_max,
                                 liouville_residual(ctx.weights, cond, u, phi));
    }

    // DN symmetry and the Alessandrini identity on a random pair
    Conductivity c1 = Conductivity::from_field(random_rough_gamma(ctx.spec, rng));
    Conductivity c2 = Conductivity::from_field(random_rough_gamma(ctx.spec, rng));
    DnMatrix dn1 = assemble_dn(ctx.weights, c1, ctx.layout, ctx.cfg.tol);
    DnMatrix dn2 = assemble_dn(ctx.weights, c2, ctx.layout, ctx.cfg.tol);

    double ales_max = 0.0;
    for (int t = 0; t < 5; ++t) {
        GridFunction f(ctx.spec), g(ctx.spec);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (long i : ctx.layout.exterior) {
            f[i] = unif(rng);
            g[i] = unif(rng);
        }
        Solution uf1 = dirichlet_solve(
            ctx.weights, make_dirichlet_problem(FormKind::conductivity, c1, ctx.layout, f),
            ctx.cfg.tol);
        Solution ug2 = dirichlet_solve(
            ctx.weights, make_dirichlet_problem(FormKind::conductivity, c2, ctx.layout, g),
            ctx.cfg.tol);
        ales_max = std::max(ales_max, alessandrini_gap(ctx.weights, c1, c2, dn1, dn2,
                                                       f, g, uf1, ug2));
    }

    // solution correspondence under the reduction, subcritical range only
    if (ctx.cfg.s < ctx.spec.dim / 2.0) {
        json reductions = json::array();
        for (int t = 0; t < 3; ++t) {
            Conductivity cond =
                Conductivity::from_field(random_rough_gamma(ctx.spec, rng));
            GridFunction g = box_bump(ctx.spec, ctx.cfg.w1_box, ctx.layout.w1);
            ReductionReport rr =
                reduce(ctx.weights, cond, ctx.layout, g, ctx.cfg.tol, ctx.cfg.seed + t);
            correspondence_max = std::max(correspondence_max, rr.correspondence_residual);
            reductions.push_back(
                {{"identity_residual", rr.identity_residual},
                 {"correspondence_residual", rr.correspondence_residual},
                 {"q_max_abs", rr.q_max_abs},
                 {"q_cauchy_schwarz_ratio", rr.q_cauchy_schwarz_ratio},
                 {"conductivity_solve",
                  {{"method", rr.conductivity_solve.method},
                   {"iterations", rr.conductivity_solve.iterations},
                   {"rel_residual", rr.conductivity_solve.rel_residual}}},
                 {"schrodinger_solve",
                  {{"method", rr.schrodinger_solve.method},
                   {"iterations", rr.schrodinger_solve.iterations},
                   {"rel_residual", rr.schrodinger_solve.rel_residual}}}});
        }
        std::ofstream out(artifact(ctx, "reduction_reports.json"));
        out << reductions.dump(2) << "\n";
        ctx.rep.metrics["correspondence_max"] = correspondence_max;
        add_le(ctx.rep, "solution_correspondence", correspondence_max, 1e-10);
    }

    ctx.rep.metrics["liouville_max"] = liouville_max;
    ctx.rep.metrics["alessandrini_max"] = ales_max;
    ctx.rep.metrics["dn_symmetry_defect"] =
        std::max(dn1.symmetry_defect, dn2.symmetry_defect);
    add_le(ctx.rep, "liouville_identity", liouville_max, 1e-12);
    add_le(ctx.rep, "alessandrini_identity", ales_max, 1e-10);
    add_le(ctx.rep, "dn_symmetry_defect",
           std::max(dn1.symmetry_defect, dn2.symmetry_defect), 1e-10);
}

void run_reconstruct(Context& ctx) {
    ExperimentConfig cfg2 = ctx.cfg;
    if (cfg2.recipe == Recipe::plateau &&
        cfg2.plateau_box.lo == cfg2.plateau_box.hi)
        cfg2.plateau_box = cfg2.w1_box;
    Conductivity cond = make_conductivity(cfg2, ctx.spec);

    std::array<double, 2> x0{};
    if (ctx.cfg.x0) {
        x0 = *ctx.cfg.x0;
    } else {
        for (std::size_t d = 0; d < 2; ++d)
            x0[d] = 0.5 * (ctx.cfg.w1_box.lo[d] + ctx.cfg.w1_box.hi[d]);
    }
    double r0;
    if (ctx.cfg.r0) {
        r0 = *ctx.cfg.r0;
    } else {
        r0 = 0.45 * (ctx.cfg.w1_box.hi[0] - ctx.cfg.w1_box.lo[0]);
        if (ctx.spec.dim == 2)
            r0 = std::min(r0, 0.45 * (ctx.cfg.w1_box.hi[1] - ctx.cfg.w1_box.lo[1]));
    }
    const double h = ctx.spec.spacing();
    int n_max = static_cast<int>(std::floor(std::log2(r0 / (4.0 * h))));
    n_max = std::min(n_max, ctx.cfg.seq_levels);
    if (n_max < 0)
        throw InvalidArgument("reconstruct: r0 under-resolved even at level 0");

    ConcentratingSequence seq =
        build_sequence(ctx.spec, ctx.layout.w1, ctx.weights, x0, r0, n_max);
    DnMatrix dn = assemble_dn(ctx.weights, cond, ctx.layout, ctx.cfg.tol);
    std::vector<double> trace = reconstruct_point(dn, seq);
    const double gamma_x0 = cond.gamma()[seq.center_node];

    {
        std::ofstream out(artifact(ctx, "reconstruct_trace.csv"));
        out << std::setprecision(17) << "level,radius,g_N,gamma_x0\n";
        for (std::size_t k = 0; k < trace.size(); ++k)
            out << k << ',' << seq.radii[k] << ',' << trace[k] << ',' << gamma_x0
                << '\n';
    }

    const double rel_err = std::abs(trace.back() - gamma_x0) / std::abs(gamma_x0);
    bool monotone = true;
    const std::size_t m = trace.size();
    for (std::size_t k = m >= 3 ? m - 3 : 0; k + 1 < m; ++k)
        if (std::abs(trace[k + 1] - gamma_x0) > std::abs(trace[k] - gamma_x0))
            monotone = false;

    ctx.rep.metrics["gamma_x0"] = gamma_x0;
    ctx.rep.metrics["g_finest"] = trace.back();
    ctx.rep.metrics["rel_err_finest"] = rel_err;
    add_le(ctx.rep, "reconstruction_rel_err", rel_err, 0.10);
    ctx.rep.criteria.push_back(
        {"reconstruction_trend_monotone", monotone, monotone ? 1.0 : 0.0, 1.0, ">="});
}

void run_stability(Context& ctx) {
    ExperimentConfig cfg2 = ctx.cfg;
    if (cfg2.recipe == Recipe::constant) cfg2.recipe = Recipe::plateau;
    if (cfg2.plateau_box.lo == cfg2.plateau_box.hi) cfg2.plateau_box = cfg2.w1_box;
    Conductivity c1 = make_conductivity(cfg2, ctx.spec);

    GridFunction g2(ctx.spec);
    for (long i = 0; i < g2.size(); ++i)
        g2[i] = 1.0 + ctx.cfg.stability_scale * (c1.gamma()[i] - 1.0);
    Conductivity c2 = Conductivity::from_field(g2);

    DnMatrix dn1 = assemble_dn(ctx.weights, c1, ctx.layout, ctx.cfg.tol);
    DnMatrix dn2 = assemble_dn(ctx.weights, c2, ctx.layout, ctx.cfg.tol);
    StabilityReport rep = stability_compare(dn1, dn2, c1, c2, ctx.layout,
                                            ctx.weights, ctx.layout.w1);
    ctx.rep.metrics["lhs_sup_gamma_diff"] = rep.lhs;
    ctx.rep.metrics["rhs_scaled_dn_norm"] = rep.rhs;
    add_le(ctx.rep, "stability_inequality", rep.lhs, rep.rhs * 1.05);
}

void run_counterexample(Context& ctx) {
    CounterexampleOptions opts;
    opts.tol = ctx.cfg.tol;
    opts.collar_cells = ctx.cfg.collar_cells;
    opts.mode = ctx.cfg.cex_mode_value();
    CounterexamplePair pair = build_counterexample(ctx.weights, ctx.layout, opts);
    NonuniquenessReport rep =
        verify_nonuniqueness(pair, ctx.weights, ctx.layout, ctx.cfg.tol);
    const double inv = invariance_of_data_residual(pair, ctx.weights, ctx.layout,
                                                   ctx.cfg.tol);

    write_csv(pair.cond1.gamma(), artifact(ctx, "gamma1.csv"));
    write_binary(pair.cond1.gamma(), artifact(ctx, "gamma1.bin"));
    write_csv(pair.m1, artifact(ctx, "m1.csv"));
    write_binary(pair.m1, artifact(ctx, "m1.bin"));

    ctx.rep.metrics["scale_c"] = pair.scale_c;
    ctx.rep.metrics["collar_cells"] = pair.collar_cells;
    ctx.rep.metrics["r_dn"] = rep.r_dn;
    ctx.rep.metrics["r_sol"] = rep.r_sol;
    ctx.rep.metrics["d_gamma"] = rep.d_gamma;
    ctx.rep.metrics["w1w1_diff"] = rep.w1w1_diff;
    ctx.rep.metrics["invariance_residual"] = inv;
    ctx.rep.metrics["m1_linf"] = norms(pair.m1).linf;
    add_le(ctx.rep, "partial_dn_agreement", rep.r_dn, 100.0 * ctx.cfg.tol);
    add_le(ctx.rep, "relation_of_solutions", rep.r_sol, 100.0 * ctx.cfg.tol);
    add_ge(ctx.rep, "gamma_difference", rep.d_gamma, 0.05);
    add_ge(ctx.rep, "same_window_distinguishable", rep.w1w1_diff, 1e-4);
    add_le(ctx.rep, "invariance_of_data", inv, 100.0 * ctx.cfg.tol);
}

void run_convergence_study(Context& ctx) {
    const double s = ctx.cfg.s;
    const int dim = ctx.cfg.dim;
    const double exact = std::pow(2.0, 2.0 * s) * std::tgamma(1.0 + s) *
                         std::tgamma(dim / 2.0 + s) / std::tgamma(dim / 2.0);
    if (ctx.cfg.half_width <= 1.0)
        throw InvalidArgument(
            "convergence-study: grid.L must exceed 1 so the profile support "
            "sits inside the box");

    std::vector<double> errs;
    std::ofstream out(artifact(ctx, "convergence.csv"));
    out << std::setprecision(17) << "N,max_rel_err\n";
    for (int n : ctx.cfg.n_list) {
        GridSpec spec = build_grid(dim, ctx.cfg.half_width, n);
        KernelWeights w = build_weights(spec, make_frac_params(dim, s));
        GridFunction u(spec);
        for (long i = 0; i < u.size(); ++i) {
            auto p = spec.node(i);
            const double r2 = p[0] * p[0] + p[1] * p[1];
            if (r2 < 1.0) u[i] = std::pow(1.0 - r2, s);
        }
        GridFunction au = apply_frac_laplacian(w, u);
        double err = 0.0;
        for (long i = 0; i < u.size(); ++i) {
            auto p = spec.node(i);
            const double r2 = p[0] * p[0] + p[1] * p[1];
            if (r2 <= 0.81) err = std::max(err, std::abs(au[i] - exact) / exact);
        }
        errs.push_back(err);
        out << n << ',' << err << '\n';
    }

    bool monotone = true;
    for (std::size_t k = 0; k + 1 < errs.size(); ++k)
        if (errs[k + 1] >= errs[k]) monotone = false;
    ctx.rep.metrics["final_max_rel_err"] = errs.back();
    ctx.rep.metrics["getoor_exact_value"] = exact;
    add_le(ctx.rep, "kernel_rel_err_finest", errs.back(), 0.05);
    ctx.rep.criteria.push_back(
        {"kernel_error_monotone", monotone, monotone ? 1.0 : 0.0, 1.0, ">="});
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    set_deterministic(cfg.deterministic);

    ExperimentReport rep;
    rep.experiment = cfg.experiment;
    rep.params_fingerprint = cfg.fingerprint;
    rep.seed = cfg.seed;

    std::filesystem::create_directories(cfg.out_dir);

    try {
        GridSpec spec = build_grid(cfg.dim, cfg.half_width, cfg.nodes_per_axis);
        RegionLayout layout = define_regions(spec, cfg.omega_box, cfg.w1_box,
                                             cfg.w2_box, cfg.omega_small_box);
        KernelWeights weights = build_weights(spec, make_frac_params(cfg.dim, cfg.s));
        Context ctx{cfg, spec, layout, std::move(weights), rep, cfg.out_dir};

        if (cfg.experiment == "forward-solve" || cfg.experiment == "solve")
            run_forward_solve(ctx);
        else if (cfg.experiment == "dn-assemble" || cfg.experiment == "dn")
            run_dn_assemble(ctx);
        else if (cfg.experiment == "verify-identities" || cfg.experiment == "verify")
            run_verify_identities(ctx);
        else if (cfg.experiment == "reconstruct")
            run_reconstruct(ctx);
        else if (cfg.experiment == "stability")
            run_stability(ctx);
        else if (cfg.experiment == "counterexample")
            run_counterexample(ctx);
        else if (cfg.experiment == "convergence-study" || cfg.experiment == "converge")
            run_convergence_study(ctx);
        else
            throw InvalidArgument("unknown experiment '" + cfg.experiment + "'");
    } catch (const Error& e) {
        rep.criteria.push_back({std::string("error: ") + e.what(), false, 0.0, 0.0, "<="});
    }

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report_json(rep, cfg.out_dir / "report.json");
    return rep;
}

void write_report_json(const ExperimentReport& rep, const std::filesystem::path& path) {
    json j;
    j["experiment"] = rep.experiment;
    j["params_fingerprint"] = rep.params_fingerprint;
    j["seed"] = rep.seed;
    j["wall_seconds"] = rep.wall_seconds;
    j["all_pass"] = rep.all_pass();
    j["criteria"] = json::array();
    for (const auto& c : rep.criteria) {
        j["criteria"].push_back({{"name", c.name},
                                 {"pass", c.pass},
                                 {"value", c.value},
                                 {"threshold", c.threshold},
                                 {"comparison", c.comparison}});
    }
    j["metrics"] = rep.metrics;
    j["artifacts"] = rep.artifacts;
    std::ofstream out(path);
    if (!out) throw IoError("write_report_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

void print_report(const ExperimentReport& rep, std::ostream& os) {
    os << "experiment: " << rep.experiment << "\n";
    for (const auto& c : rep.criteria) {
        os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << " (" << c.value
           << " " << c.comparison << " " << c.threshold << ")\n";
    }
    for (const auto& [k, v] : rep.metrics) os << "  " << k << " = " << v << "\n";
    os << "  wall_seconds = " << rep.wall_seconds << "\n";
}

}  // namespace fracond
