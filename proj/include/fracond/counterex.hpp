#ifndef FRACOND_COUNTEREX_HPP
#define FRACOND_COUNTEREX_HPP

#include "fracond/liouville.hpp"

namespace fracond {

/// Nonuniqueness pair: gamma2 == 1, gamma1 = (1 + m1)^2 with m1 a scaled
/// discrete s-harmonic extension of a smooth cutoff supported near
/// omega_small, vanishing on W1 and W2.
struct CounterexamplePair {
    Conductivity cond1;
    Conductivity cond2;
    GridFunction m1;
    GridFunction eta;      // the smoothed cutoff used as exterior data
    double scale_c = 0.0;  // m1 = scale_c * mtilde
    int collar_cells = 0;
};

enum class CounterexampleMode {
    /// s-harmonic solve directly on Omega with a pre-smoothed cutoff; the
    /// DN-agreement mechanism is then exact up to solver error.
    direct,
    /// Enlarged-domain solve on a dilated Omega followed by mollification,
    /// tracking the construction in the source analysis; the agreement is
    /// then only approximate at finite h.
    collar,
};

struct CounterexampleOptions {
    double tol = 1e-12;
    int collar_cells = 2;  // cutoff smoothing radius in cells
    CounterexampleMode mode = CounterexampleMode::direct;
    int omega_dilation_cells = 4;  // collar mode only
};

CounterexamplePair build_counterexample(const KernelWeights& w,
                                        const RegionLayout& layout,
                                        const CounterexampleOptions& opts = {});

struct NonuniquenessReport {
    double r_dn = 0;       // relative max-norm of the W1->W2 DN block difference
    double r_sol = 0;      // worst relation-of-solutions residual over a W1 basis
    double d_gamma = 0;    // max over Omega of |gamma1 - gamma2|
    double w1w1_diff = 0;  // max-norm of the W1->W1 block difference (not small)
    double dn_symmetry_defect = 0;

    bool pass(double tol) const {
        return r_dn <= 100.0 * tol && r_sol <= 100.0 * tol && d_gamma >= 0.05;
    }
};

NonuniquenessReport verify_nonuniqueness(const CounterexamplePair& pair,
                                         const KernelWeights& w,
                                         const RegionLayout& layout, double tol,
                                         int n_relation_basis = 5);

/// Normalized interior weak-form residual of m = m1 - m2 against interior
/// nodal test functions; the discrete content of the data-invariance
/// equation (here gamma2 == 1, so the potential term vanishes).
double invariance_of_data_residual(const CounterexamplePair& pair,
                                   const KernelWeights& w,
                                   const RegionLayout& layout, double tol);

}  // namespace fracond

#endif
