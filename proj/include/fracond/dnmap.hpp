#ifndef FRACOND_DNMAP_HPP
#define FRACOND_DNMAP_HPP

#include <cstdint>
#include <filesystem>

#include "fracond/solve.hpp"

namespace fracond {

/// Discrete exterior DN map on the exterior nodal basis:
/// lambda(g, f) = B_gamma(u_{e_f}, e_g).
struct DnMatrix {
    GridSpec spec;
    double s = 0.0;
    std::vector<long> exterior;  // node ids indexing rows and columns
    Eigen::MatrixXd lambda;
    double symmetry_defect = 0.0;
    std::uint64_t layout_hash = 0;
    std::uint64_t gamma_hash = 0;
};

enum class DnMethod { automatic, schur, column_cg };

/// One Dirichlet solve per exterior basis column. All columns share the
/// interior factorization, so the assembly reduces to the Schur complement
/// of the interior block; above the dense threshold (or on request) it
/// falls back to independent CG column solves.
DnMatrix assemble_dn(const KernelWeights& w, const Conductivity& cond,
                     const RegionLayout& layout, double tol = 1e-12,
                     DnMethod method = DnMethod::automatic);

/// Partial-data view: inputs supported in `from`, measurements tested
/// against `to`. Rows follow `to`, columns follow `from`.
struct DnBlock {
    std::vector<long> to, from;
    Eigen::MatrixXd m;
};

DnBlock restrict_block(const DnMatrix& dn, const std::vector<long>& from,
                       const std::vector<long>& to);
DnBlock restrict_block(const DnBlock& b, const std::vector<long>& from,
                       const std::vector<long>& to);

/// |<(Lambda1-Lambda2)f, g> - (B_{gamma1}-B_{gamma2})(u_f^1, u_g^2)|.
/// Exact discretely up to solver error.
double alessandrini_gap(const KernelWeights& w, const Conductivity& cond1,
                        const Conductivity& cond2, const DnMatrix& dn1,
                        const DnMatrix& dn2, const GridFunction& f,
                        const GridFunction& g, const Solution& uf1,
                        const Solution& ug2);

/// Largest |eigenvalue| of G^{-1/2} M G^{-1/2} for symmetric M and SPD G,
/// by power iteration on the squared operator.
double weighted_operator_norm(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gram,
                              double tol = 1e-8);

/// Operator norm of a DN difference in the discrete exterior energy norm:
/// G = h^n I + B_1 restricted to the exterior nodal basis (couplings
/// through Omega included).
double dn_operator_norm(const Eigen::MatrixXd& dn_diff, const KernelWeights& w,
                        const std::vector<long>& exterior_nodes, double tol = 1e-8);

void write_dn_csv(const DnMatrix& dn, const std::filesystem::path& path);

}  // namespace fracond

#endif
