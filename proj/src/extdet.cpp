#include "fracond/extdet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracond {

ConcentratingSequence build_sequence(const GridSpec& spec,
                                     const std::vector<long>& window,
                                     const KernelWeights& kw,
                                     const std::array<double, 2>& x0, double r0,
                                     int n_max) {
    check_same_grid(spec, kw.spec(), "build_sequence");
    if (window.empty()) throw GeometryError("build_sequence: empty window");
    if (n_max < 0) throw InvalidArgument("build_sequence: n_max must be >= 0");
    const double h = spec.spacing();
    if (r0 * std::pow(2.0, -n_max) < 4.0 * h)
        throw InvalidArgument(
            "build_sequence: finest radius under-resolved; need r0 2^{-n_max} >= 4h");

    ConcentratingSequence seq;
    seq.center = x0;

    // snap the center to the nearest window node
    double best = std::numeric_limits<double>::infinity();
    for (long i : window) {
        auto p = spec.node(i);
        const double d2 = (p[0] - x0[0]) * (p[0] - x0[0]) + (p[1] - x0[1]) * (p[1] - x0[1]);
        if (d2 < best) {
            best = d2;
            seq.center_node = i;
        }
    }
    const auto c = spec.node(seq.center_node);

    for (int level = 0; level <= n_max; ++level) {
        const double r = r0 * std::pow(2.0, -level);
        GridFunction phi(spec);
        for (long i = 0; i < spec.node_count(); ++i) {
            auto p = spec.node(i);
            const double t2 = ((p[0] - c[0]) * (p[0] - c[0]) +
                               (p[1] - c[1]) * (p[1] - c[1])) / (r * r);
            if (t2 >= 1.0) continue;
            const double v = std::exp(-1.0 / (1.0 - t2));
            if (v == 0.0) continue;
            if (!std::binary_search(window.begin(), window.end(), i))
                throw GeometryError(
                    "build_sequence: ball(x0, r0) escapes the window");
            phi[i] = v;
        }
        const double l2sq = dot_l2(phi, phi);
        const double energy_one = b_one(kw, phi, phi);
        const double total = l2sq + energy_one;
        if (!(total > 0.0))
            throw GeometryError("build_sequence: bump rasterizes to zero");
        const double scale_c = 1.0 / std::sqrt(total);
        phi = scale(phi, scale_c);
        seq.radii.push_back(r);
        seq.l2_norms.push_back(std::sqrt(l2sq) * scale_c);
        seq.members.push_back(std::move(phi));
    }
    return seq;
}

std::vector<double> reconstruct_point(const DnMatrix& dn,
                                      const ConcentratingSequence& seq) {
    std::vector<double> trace;
    trace.reserve(seq.members.size());
    for (const GridFunction& phi : seq.members) {
        for (long i = 0; i < phi.size(); ++i)
            if (phi[i] != 0.0 &&
                !std::binary_search(dn.exterior.begin(), dn.exterior.end(), i))
                throw GeometryError(
                    "reconstruct_point: sequence member leaves the DN exterior");
        Eigen::VectorXd v(static_cast<Eigen::Index>(dn.exterior.size()));
        for (std::size_t p = 0; p < dn.exterior.size(); ++p)
            v(static_cast<Eigen::Index>(p)) = phi[dn.exterior[p]];
        trace.push_back(v.dot(dn.lambda * v));
    }
    return trace;
}

StabilityReport stability_compare(const DnMatrix& dn1, const DnMatrix& dn2,
                                  const Conductivity& cond1, const Conductivity& cond2,
                                  const RegionLayout& layout, const KernelWeights& kw,
                                  const std::vector<long>& window) {
    if (dn1.exterior != dn2.exterior)
        throw GridMismatch("stability_compare: DN maps cover different exteriors");
    check_same_grid(cond1.spec(), cond2.spec(), "stability_compare");
    StabilityReport rep;
    rep.lhs = max_abs_on(sub(cond1.gamma(), cond2.gamma()), window);
    Eigen::MatrixXd diff = dn1.lambda - dn2.lambda;
    rep.rhs = std::pow(2.0, kw.params().s) *
              dn_operator_norm(diff, kw, layout.exterior);
    return rep;
}

}  // namespace fracond
