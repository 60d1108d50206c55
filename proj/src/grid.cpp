#include "fracond/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace fracond {

namespace {
std::atomic<bool> g_deterministic{false};
}

void set_deterministic(bool on) { g_deterministic.store(on); }
bool deterministic() { return g_deterministic.load(); }

double GridSpec::cell_volume() const {
    double h = spacing();
    return dim == 1 ? h : h * h;
}

GridSpec build_grid(int dim, double half_width, int nodes_per_axis) {
    if (dim != 1 && dim != 2)
        throw InvalidArgument("build_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidArgument("build_grid: half_width must be positive");
    if (nodes_per_axis < 8)
        throw InvalidArgument("build_grid: need at least 8 nodes per axis, got " +
                              std::to_string(nodes_per_axis));
    return GridSpec{dim, half_width, nodes_per_axis};
}

std::vector<long> rasterize_box(const GridSpec& spec, const Box& box) {
    std::vector<long> out;
    const long n = spec.node_count();
    for (long idx = 0; idx < n; ++idx) {
        if (box.contains(spec.node(idx), spec.dim)) out.push_back(idx);
    }
    return out;
}

int lattice_gap(const GridSpec& spec, const std::vector<long>& a,
                const std::vector<long>& b) {
    int best = std::numeric_limits<int>::max();
    for (long ia : a) {
        auto pa = spec.unflatten(ia);
        for (long ib : b) {
            auto pb = spec.unflatten(ib);
            int d = std::max(std::abs(pa[0] - pb[0]), std::abs(pa[1] - pb[1]));
            best = std::min(best, d);
        }
    }
    return best;
}

std::vector<long> dilate(const GridSpec& spec, const std::vector<long>& nodes,
                         int cells) {
    std::vector<std::uint8_t> mark(static_cast<std::size_t>(spec.node_count()), 0);
    const int n = spec.nodes_per_axis;
    for (long idx : nodes) {
        auto p = spec.unflatten(idx);
        for (int dx = -cells; dx <= cells; ++dx) {
            int ix = p[0] + dx;
            if (ix < 0 || ix >= n) continue;
            if (spec.dim == 1) {
                mark[static_cast<std::size_t>(ix)] = 1;
            } else {
                for (int dy = -cells; dy <= cells; ++dy) {
                    int iy = p[1] + dy;
                    if (iy < 0 || iy >= n) continue;
                    mark[static_cast<std::size_t>(spec.flatten(ix, iy))] = 1;
                }
            }
        }
    }
    std::vector<long> out;
    for (long i = 0; i < spec.node_count(); ++i)
        if (mark[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

namespace {

void check_disjoint(const std::vector<long>& a, const std::vector<long>& b,
                    const char* na, const char* nb) {
    // both sorted
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) {
            std::ostringstream msg;
            msg << "define_regions: regions '" << na << "' and '" << nb
                << "' overlap after rasterization (node " << *ia << ")";
            throw GeometryError(msg.str());
        }
        if (*ia < *ib)
            ++ia;
        else
            ++ib;
    }
}

}  // namespace

RegionLayout define_regions(const GridSpec& spec, const Box& omega_box,
                            const Box& w1_box, const Box& w2_box,
                            const std::optional<Box>& omega_small_box) {
    RegionLayout lay;
    lay.spec = spec;
    lay.omega = rasterize_box(spec, omega_box);
    lay.w1 = rasterize_box(spec, w1_box);
    lay.w2 = rasterize_box(spec, w2_box);
    if (omega_small_box) lay.omega_small = rasterize_box(spec, *omega_small_box);

    if (lay.omega.empty()) throw GeometryError("define_regions: omega rasterizes to no nodes");
    if (lay.w1.empty()) throw GeometryError("define_regions: w1 rasterizes to no nodes");
    if (lay.w2.empty()) throw GeometryError("define_regions: w2 rasterizes to no nodes");
    if (omega_small_box && lay.omega_small.empty())
        throw GeometryError("define_regions: omega_small rasterizes to no nodes");

    check_disjoint(lay.omega, lay.w1, "omega", "w1");
    check_disjoint(lay.omega, lay.w2, "omega", "w2");
    check_disjoint(lay.w1, lay.w2, "w1", "w2");
    if (!lay.omega_small.empty()) {
        check_disjoint(lay.omega, lay.omega_small, "omega", "omega_small");
        check_disjoint(lay.w1, lay.omega_small, "w1", "omega_small");
        check_disjoint(lay.w2, lay.omega_small, "w2", "omega_small");
        // omega_small feeds the counterexample cutoff; keep it off the
        // measurement windows by at least one empty cell.
        std::vector<long> w12 = lay.w1;
        w12.insert(w12.end(), lay.w2.begin(), lay.w2.end());
        std::sort(w12.begin(), w12.end());
        if (lattice_gap(spec, lay.omega_small, w12) < 2)
            throw GeometryError(
                "define_regions: omega_small must be separated from w1 and w2 "
                "by at least one empty cell");
    }

    lay.is_omega.assign(static_cast<std::size_t>(spec.node_count()), 0);
    for (long i : lay.omega) lay.is_omega[static_cast<std::size_t>(i)] = 1;
    for (long i = 0; i < spec.node_count(); ++i)
        if (!lay.is_omega[static_cast<std::size_t>(i)]) lay.exterior.push_back(i);
    return lay;
}

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!a.same_grid(b))
        throw GridMismatch(std::string(where) + ": operands live on different grids");
}

void check_finite(const GridFunction& u, const char* where) {
    for (double v : u.values)
        if (!std::isfinite(v))
            throw InvalidArgument(std::string(where) + ": non-finite nodal value");
}

Norms norms(const GridFunction& u) {
    double s = 0.0, m = 0.0;
    for (double v : u.values) {
        s += v * v;
        m = std::max(m, std::abs(v));
    }
    return Norms{std::sqrt(u.spec.cell_volume() * s), m};
}

GridFunction add(const GridFunction& a, const GridFunction& b) {
    check_same_grid(a.spec, b.spec, "add");
    GridFunction out(a.spec);
    for (long i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

GridFunction sub(const GridFunction& a, const GridFunction& b) {
    check_same_grid(a.spec, b.spec, "sub");
    GridFunction out(a.spec);
    for (long i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

GridFunction scale(const GridFunction& a, double c) {
    GridFunction out(a.spec);
    for (long i = 0; i < a.size(); ++i) out[i] = c * a[i];
    return out;
}

GridFunction pointwise_mul(const GridFunction& a, const GridFunction& b) {
    check_same_grid(a.spec, b.spec, "pointwise_mul");
    GridFunction out(a.spec);
    for (long i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double dot_l2(const GridFunction& a, const GridFunction& b) {
    check_same_grid(a.spec, b.spec, "dot_l2");
    double s = 0.0;
    for (long i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return a.spec.cell_volume() * s;
}

double max_abs_on(const GridFunction& u, const std::vector<long>& nodes) {
    double m = 0.0;
    for (long i : nodes) m = std::max(m, std::abs(u[i]));
    return m;
}

}  // namespace fracond
