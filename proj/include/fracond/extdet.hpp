#ifndef FRACOND_EXTDET_HPP
#define FRACOND_EXTDET_HPP

#include "fracond/dnmap.hpp"

namespace fracond {

/// Bumps phi_N supported in ball(x0, r0 2^{-N}) inside a measurement
/// window, each normalized so ||phi||_L2^2 + B_1(phi,phi) = 1. Radii stop
/// at 4h so every member stays resolvable.
struct ConcentratingSequence {
    long center_node = -1;
    std::array<double, 2> center{0.0, 0.0};
    std::vector<double> radii;
    std::vector<GridFunction> members;
    std::vector<double> l2_norms;
};

ConcentratingSequence build_sequence(const GridSpec& spec,
                                     const std::vector<long>& window,
                                     const KernelWeights& w,
                                     const std::array<double, 2>& x0, double r0,
                                     int n_max);

/// g_N = <Lambda phi_N, phi_N> for each member; approaches gamma(x0) for
/// gamma continuous at x0 until grid resolution takes over.
std::vector<double> reconstruct_point(const DnMatrix& dn,
                                      const ConcentratingSequence& seq);

struct StabilityReport {
    double lhs = 0;  // max over window nodes of |gamma1 - gamma2|
    double rhs = 0;  // 2^s * operator norm of the DN difference
    bool holds(double slack = 0.05) const { return lhs <= rhs * (1.0 + slack); }
};

/// Compares the sup difference of the conductivities over `window` against
/// the scaled DN-difference norm measured over the whole exterior.
StabilityReport stability_compare(const DnMatrix& dn1, const DnMatrix& dn2,
                                  const Conductivity& cond1, const Conductivity& cond2,
                                  const RegionLayout& layout, const KernelWeights& w,
                                  const std::vector<long>& window);

}  // namespace fracond

#endif
