#include "fracond/dnmap.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fracond/gridio.hpp"

namespace fracond {

namespace {

void check_subset_of_exterior(const std::vector<long>& window,
                              const std::vector<long>& exterior, const char* name) {
    for (long idx : window) {
        if (!std::binary_search(exterior.begin(), exterior.end(), idx))
            throw GeometryError(std::string("restrict_block: window '") + name +
                                "' contains node " + std::to_string(idx) +
                                " outside the exterior");
    }
}

std::vector<Eigen::Index> positions_of(const std::vector<long>& window,
                                       const std::vector<long>& base) {
    std::vector<Eigen::Index> pos;
    pos.reserve(window.size());
    for (long idx : window) {
        auto it = std::lower_bound(base.begin(), base.end(), idx);
        if (it == base.end() || *it != idx)
            throw GeometryError("restrict_block: node " + std::to_string(idx) +
                                " is not covered by this DN matrix");
        pos.push_back(static_cast<Eigen::Index>(it - base.begin()));
    }
    return pos;
}

}  // namespace

DnMatrix assemble_dn(const KernelWeights& kw, const Conductivity& cond,
                     const RegionLayout& layout, double tol, DnMethod method) {
    check_same_grid(kw.spec(), cond.spec(), "assemble_dn");
    check_same_grid(kw.spec(), layout.spec, "assemble_dn");
    if (layout.exterior.empty()) throw GeometryError("assemble_dn: empty exterior");

    DnMatrix dn;
    dn.spec = kw.spec();
    dn.s = kw.params().s;
    dn.exterior = layout.exterior;
    dn.layout_hash = content_hash(layout.omega);
    dn.gamma_hash = content_hash(cond.gamma().values);

    const auto& ext = layout.exterior;
    const auto& omega = layout.omega;
    const Eigen::Index ne = static_cast<Eigen::Index>(ext.size());

    const bool use_schur =
        method == DnMethod::schur ||
        (method == DnMethod::automatic && static_cast<long>(omega.size()) <= 5000);
    if (use_schur) {
        Eigen::MatrixXd a_ee = form_block(kw, cond, FormKind::conductivity, ext, ext);
        Eigen::MatrixXd a_eo = form_block(kw, cond, FormKind::conductivity, ext, omega);
        Eigen::MatrixXd k = form_block(kw, cond, FormKind::conductivity, omega, omega);
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() != Eigen::Success)
            throw IndefiniteFormError("assemble_dn: interior block not SPD");
        // u-column for exterior basis f solves K u = -A_OmegaE e_f, and
        // lambda(:,f) = A_EE e_f + A_EOmega u, i.e. the Schur complement.
        Eigen::MatrixXd x = llt.solve(a_eo.transpose());
        dn.lambda = a_ee - a_eo * x;
    } else {
        dn.lambda.resize(ne, ne);
#pragma omp parallel for schedule(dynamic)
        for (Eigen::Index c = 0; c < ne; ++c) {
            GridFunction f(kw.spec());
            f[ext[static_cast<std::size_t>(c)]] = 1.0;
            DirichletProblem prob{FormKind::conductivity, cond, layout, f};
            SolveOptions opts;
            opts.tol = tol;
            opts.force_cg = method == DnMethod::column_cg;
            Solution sol = dirichlet_solve(kw, prob, opts);
            GridFunction au = apply_form_serial(kw, cond, FormKind::conductivity, sol.u);
            for (Eigen::Index r = 0; r < ne; ++r)
                dn.lambda(r, c) = au[ext[static_cast<std::size_t>(r)]];
        }
    }

    dn.symmetry_defect = (dn.lambda - dn.lambda.transpose()).cwiseAbs().maxCoeff();
    return dn;
}

DnBlock restrict_block(const DnMatrix& dn, const std::vector<long>& from,
                       const std::vector<long>& to) {
    check_subset_of_exterior(from, dn.exterior, "from");
    check_subset_of_exterior(to, dn.exterior, "to");
    auto rows = positions_of(to, dn.exterior);
    auto cols = positions_of(from, dn.exterior);
    DnBlock b;
    b.to = to;
    b.from = from;
    b.m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            b.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                dn.lambda(rows[r], cols[c]);
    return b;
}

DnBlock restrict_block(const DnBlock& base, const std::vector<long>& from,
                       const std::vector<long>& to) {
    auto rows = positions_of(to, base.to);
    auto cols = positions_of(from, base.from);
    DnBlock b;
    b.to = to;
    b.from = from;
    b.m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            b.m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                base.m(rows[r], cols[c]);
    return b;
}

double alessandrini_gap(const KernelWeights& kw, const Conductivity& cond1,
                        const Conductivity& cond2, const DnMatrix& dn1,
                        const DnMatrix& dn2, const GridFunction& f,
                        const GridFunction& g, const Solution& uf1,
                        const Solution& ug2) {
    if (dn1.exterior != dn2.exterior)
        throw GridMismatch("alessandrini_gap: DN maps cover different exteriors");
    const auto& ext = dn1.exterior;
    Eigen::VectorXd fv(static_cast<Eigen::Index>(ext.size()));
    Eigen::VectorXd gv(static_cast<Eigen::Index>(ext.size()));
    for (std::size_t p = 0; p < ext.size(); ++p) {
        fv(static_cast<Eigen::Index>(p)) = f[ext[p]];
        gv(static_cast<Eigen::Index>(p)) = g[ext[p]];
    }
    const double lhs = gv.dot((dn1.lambda - dn2.lambda) * fv);
    const double rhs =
        b_gamma(kw, cond1, uf1.u, ug2.u) - b_gamma(kw, cond2, uf1.u, ug2.u);
    return std::abs(lhs - rhs);
}

double weighted_operator_norm(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gram,
                              double tol) {
    if (m.rows() != m.cols() || gram.rows() != gram.cols() || m.rows() != gram.rows())
        throw InvalidArgument("weighted_operator_norm: dimension mismatch");
    if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SolverError("weighted_operator_norm: Gram matrix not SPD");

    // power iteration on (G^{-1}M)^2, which is similar to the PSD square of
    // the symmetrized operator
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 1e-3 * std::sin(1.0 + 3.7 * i);
    x /= std::sqrt(x.dot(gram * x));
    double est_prev = -1.0;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd z = m * x;
        Eigen::VectorXd y = llt.solve(z);
        const double est2 = z.dot(y);  // x' M G^{-1} M x with x'Gx = 1
        const double est = std::sqrt(std::max(est2, 0.0));
        Eigen::VectorXd w = m * y;
        Eigen::VectorXd next = llt.solve(w);
        const double nn = std::sqrt(next.dot(gram * next));
        if (nn == 0.0) return est;
        x = next / nn;
        if (est_prev >= 0.0 && std::abs(est - est_prev) <= tol * std::max(est, 1e-300))
            return est;
        est_prev = est;
    }
    throw SolverError("weighted_operator_norm: power iteration did not converge");
}

double dn_operator_norm(const Eigen::MatrixXd& dn_diff, const KernelWeights& kw,
                        const std::vector<long>& exterior_nodes, double tol) {
    if (dn_diff.rows() != static_cast<Eigen::Index>(exterior_nodes.size()))
        throw InvalidArgument("dn_operator_norm: matrix size does not match node list");
    Conductivity one = Conductivity::constant_one(kw.spec());
    Eigen::MatrixXd gram =
        form_block(kw, one, FormKind::conductivity, exterior_nodes, exterior_nodes);
    gram.diagonal().array() += kw.spec().cell_volume();
    return weighted_operator_norm(dn_diff, gram, tol);
}

void write_dn_csv(const DnMatrix& dn, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_dn_csv: cannot open " + path.string());
    out << std::setprecision(17);
    out << "# dim=" << dn.spec.dim << ",L=" << dn.spec.half_width
        << ",N=" << dn.spec.nodes_per_axis << ",s=" << dn.s << ",layout_hash=" << std::hex
        << dn.layout_hash << ",gamma_hash=" << dn.gamma_hash << std::dec << "\n";
    out << "row_node,col_node,value\n";
    for (std::size_t r = 0; r < dn.exterior.size(); ++r)
        for (std::size_t c = 0; c < dn.exterior.size(); ++c)
            out << dn.exterior[r] << ',' << dn.exterior[c] << ','
                << dn.lambda(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))
                << '\n';
    if (!out) throw IoError("write_dn_csv: write failed for " + path.string());
}

}  // namespace fracond
