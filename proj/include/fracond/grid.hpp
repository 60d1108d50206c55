#ifndef FRACOND_GRID_HPP
#define FRACOND_GRID_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fracond/common.hpp"

namespace fracond {

/// Cell-centered lattice on the box [-L,L]^dim. Node coordinates along an
/// axis are x_i = -L + (i+1/2)h with h = 2L/N, so no node ever sits on the
/// box boundary or on an axis-aligned region interface.
struct GridSpec {
    int dim = 1;              // 1 or 2
    double half_width = 1.0;  // L
    int nodes_per_axis = 8;   // N

    double spacing() const { return 2.0 * half_width / nodes_per_axis; }
    long node_count() const {
        long n = nodes_per_axis;
        return dim == 1 ? n : n * n;
    }
    /// h^dim, the cell volume.
    double cell_volume() const;

    double axis_coord(int i) const {
        return -half_width + (i + 0.5) * spacing();
    }

    long flatten(int ix, int iy = 0) const {
        return dim == 1 ? ix : static_cast<long>(ix) * nodes_per_axis + iy;
    }
    std::array<int, 2> unflatten(long idx) const {
        if (dim == 1) return {static_cast<int>(idx), 0};
        return {static_cast<int>(idx / nodes_per_axis),
                static_cast<int>(idx % nodes_per_axis)};
    }
    std::array<double, 2> node(long idx) const {
        auto ij = unflatten(idx);
        return {axis_coord(ij[0]), dim == 2 ? axis_coord(ij[1]) : 0.0};
    }

    bool same_grid(const GridSpec& o) const {
        return dim == o.dim && half_width == o.half_width &&
               nodes_per_axis == o.nodes_per_axis;
    }
};

GridSpec build_grid(int dim, double half_width, int nodes_per_axis);

/// Axis-aligned open box; in 1D only the first axis is used.
struct Box {
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    static Box interval(double a, double b) { return Box{{a, 0.0}, {b, 0.0}}; }
    static Box rect(double ax, double bx, double ay, double by) {
        return Box{{ax, ay}, {bx, by}};
    }
    bool contains(const std::array<double, 2>& x, int dim) const {
        for (int d = 0; d < dim; ++d)
            if (x[d] <= lo[d] || x[d] >= hi[d]) return false;
        return true;
    }
};

/// Disjoint node-index masks for the domain Omega, the two exterior
/// measurement windows, and the small exterior set used by the
/// counterexample construction. Everything not in Omega is exterior.
struct RegionLayout {
    GridSpec spec;
    std::vector<long> omega;        // sorted node indices
    std::vector<long> w1, w2;       // measurement windows, subsets of exterior
    std::vector<long> omega_small;  // may be empty
    std::vector<long> exterior;     // complement of omega, sorted
    std::vector<std::uint8_t> is_omega;  // fast membership, node_count entries

    bool in_omega(long idx) const { return is_omega[idx] != 0; }
};

RegionLayout define_regions(const GridSpec& spec, const Box& omega_box,
                            const Box& w1_box, const Box& w2_box,
                            const std::optional<Box>& omega_small_box);

/// Minimum Chebyshev index distance between two node sets. A value >= 2
/// means at least one full empty cell separates them.
int lattice_gap(const GridSpec& spec, const std::vector<long>& a,
                const std::vector<long>& b);

std::vector<long> rasterize_box(const GridSpec& spec, const Box& box);

/// Indices within Chebyshev index distance `cells` of the given set
/// (including the set itself), clipped to the grid.
std::vector<long> dilate(const GridSpec& spec, const std::vector<long>& nodes,
                         int cells);

/// Nodal values on the lattice; implicitly zero outside the box.
struct GridFunction {
    GridSpec spec;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(const GridSpec& s, double fill = 0.0)
        : spec(s), values(static_cast<std::size_t>(s.node_count()), fill) {}

    double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }
    long size() const { return static_cast<long>(values.size()); }
};

void check_same_grid(const GridSpec& a, const GridSpec& b, const char* where);
void check_finite(const GridFunction& u, const char* where);

struct Norms {
    double l2 = 0.0;
    double linf = 0.0;
};

/// l2 = (h^n sum u_i^2)^(1/2), linf = max |u_i|.
Norms norms(const GridFunction& u);

GridFunction add(const GridFunction& a, const GridFunction& b);
GridFunction sub(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& a, double c);
GridFunction pointwise_mul(const GridFunction& a, const GridFunction& b);
double dot_l2(const GridFunction& a, const GridFunction& b);  // h^n sum a_i b_i
double max_abs_on(const GridFunction& u, const std::vector<long>& nodes);

}  // namespace fracond

#endif
