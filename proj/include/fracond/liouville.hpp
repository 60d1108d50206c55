#ifndef FRACOND_LIOUVILLE_HPP
#define FRACOND_LIOUVILLE_HPP

#include "fracond/dnmap.hpp"

namespace fracond {

struct ReductionReport {
    double identity_residual = 0;        // max Liouville residual over the batch
    double correspondence_residual = 0;  // ||g^{1/2} u_g - v||_inf
    double q_max_abs = 0;
    double q_cauchy_schwarz_ratio = 0;   // |q_form| / (B1(m,m) B1(psi,psi))^(1/2)
    SolveDiagnostics conductivity_solve;
    SolveDiagnostics schrodinger_solve;
};

/// Solves the conductivity problem for exterior data g and the Schroedinger
/// problem for exterior data gamma^{1/2} g, and reports how far
/// gamma^{1/2} u_g is from the Schroedinger solution. Exact discretely up
/// to solver error.
ReductionReport reduce(const KernelWeights& w, const Conductivity& cond,
                       const RegionLayout& layout, const GridFunction& g,
                       double tol, unsigned batch_seed = 1234);

struct RelationReport {
    double sup_diff = 0;  // ||g1^{1/2} u_f^1 - g2^{1/2} u_f^2||_inf
    SolveDiagnostics solve1, solve2;
};

/// Requires gamma1 = gamma2 on W2 and f supported in W1. The caller is
/// responsible for verifying that the W1->W2 DN blocks agree (use
/// dn_partial_gap); without that hypothesis the returned value is expected
/// to be large.
RelationReport relation_of_solutions_check(const KernelWeights& w,
                                           const Conductivity& cond1,
                                           const Conductivity& cond2,
                                           const RegionLayout& layout,
                                           const GridFunction& f, double tol);

/// Relative max-norm of restrict(Lambda1 - Lambda2, W1, W2); the
/// precondition quantity of the relation-of-solutions identity.
double dn_partial_gap(const DnMatrix& dn1, const DnMatrix& dn2,
                      const RegionLayout& layout);

/// Residual of <(Lambda1-Lambda2)f,f> against the two-term split
/// B_1(g1^{1/2}u1 - g2^{1/2}u2, g1^{1/2}f) - B_1(m1-m2, g1^{1/2}f^2),
/// with f^2 the nodal square. Requires gamma1 = gamma2 on supp(f).
double alessandrini_decomposition_residual(const KernelWeights& w,
                                           const Conductivity& cond1,
                                           const Conductivity& cond2,
                                           const GridFunction& f,
                                           const Solution& uf1, const Solution& uf2);

/// Polarization pair for identity tests: a cutoff phi equal to 1 on the
/// support of f (and supported in `window`), and g = phi - f, so that
/// f^2 - g^2 = 2f - phi^2 holds nodally.
struct PolarizationPair {
    GridFunction phi;
    GridFunction g;
};

PolarizationPair make_polarization_pair(const GridSpec& spec,
                                        const std::vector<long>& window,
                                        const GridFunction& f, int cutoff_cells = 2);

}  // namespace fracond

#endif
