#ifndef FRACOND_KERNEL_HPP
#define FRACOND_KERNEL_HPP

#include <filesystem>
#include <optional>

#include "fracond/grid.hpp"

namespace fracond {

/// Normalization constant of the fractional Laplacian,
/// C_{n,s} = 4^s Gamma(n/2+s) / (pi^{n/2} |Gamma(-s)|).
double frac_constant(int dim, double s);

struct FracParams {
    int dim = 1;
    double s = 0.5;
    double c_ns = 0.0;

    /// Range (0,1) is enough for the forward machinery; the reduction to the
    /// Schroedinger form and the counterexample construction additionally
    /// need s < dim/2 and call this.
    void require_subcritical(const char* where) const;
};

FracParams make_frac_params(int dim, double s);

/// Quadrature weights of the singular kernel |x-y|^{-(n+2s)} on the lattice.
///
/// Pair weights depend only on the index offset and are stored once per
/// offset: w_ij = (C/2) h^n Int_{C_j} |x_i-y|^{-(n+2s)} dy for cells at
/// Chebyshev offset 1 (exact 1D antiderivative / tensor Gauss in 2D), and
/// the midpoint value (C/2) h^{2n} |x_i-x_j|^{-(n+2s)} further out. The
/// per-node tail weight tau_i = C h^n Int_{R^n \ box} |x_i-y|^{-(n+2s)} dy
/// closes the form under the convention that functions vanish outside the
/// box. In 2D the radial part is the closed-form power-law antiderivative
/// from the box exit distance (the finite-radius cutoff and the analytic
/// closure beyond it cancel exactly), and the angular part is Gauss
/// quadrature on the four smooth corner-to-corner arcs.
class KernelWeights {
  public:
    KernelWeights() = default;

    const GridSpec& spec() const { return spec_; }
    const FracParams& params() const { return params_; }

    /// w_ij for i != j. Symmetric by construction.
    double pair_weight(long i, long j) const {
        auto a = spec_.unflatten(i);
        auto b = spec_.unflatten(j);
        return offset_weight(a[0] - b[0], a[1] - b[1]);
    }

    double offset_weight(int dx, int dy = 0) const {
        dx = dx < 0 ? -dx : dx;
        dy = dy < 0 ? -dy : dy;
        return stencil_[static_cast<std::size_t>(
            spec_.dim == 1 ? dx : dx * spec_.nodes_per_axis + dy)];
    }

    double tail_weight(long i) const { return tail_[static_cast<std::size_t>(i)]; }

    const std::vector<double>& stencil() const { return stencil_; }
    const std::vector<double>& tail() const { return tail_; }

    friend KernelWeights build_weights(const GridSpec&, const FracParams&);
    friend std::optional<KernelWeights> load_weights(const std::filesystem::path&);

  private:
    GridSpec spec_;
    FracParams params_;
    std::vector<double> stencil_;  // indexed by |offset|
    std::vector<double> tail_;     // per node
};

KernelWeights build_weights(const GridSpec& spec, const FracParams& params);

/// (Au)_i = h^{-n} [ sum_{j != i} 2 w_ij (u_i - u_j) + tau_i u_i ].
/// Row-parallel; `apply_frac_laplacian_serial` is the reference kept for
/// testing and for bit-reproducible runs.
GridFunction apply_frac_laplacian(const KernelWeights& w, const GridFunction& u);
GridFunction apply_frac_laplacian_serial(const KernelWeights& w, const GridFunction& u);

/// Discrete convolution with a normalized compactly supported smooth bump
/// of the given radius (>= h). Stencil weights sum to one against h^n, so
/// mass is preserved away from the box boundary.
GridFunction mollify(const GridSpec& spec, const GridFunction& u, double radius);

/// Weight cache keyed by (dim, L, N, s) plus a format version. A cache hit
/// is bit-identical to recomputation.
void save_weights(const KernelWeights& w, const std::filesystem::path& path);
std::optional<KernelWeights> load_weights(const std::filesystem::path& path);
KernelWeights build_weights_cached(const GridSpec& spec, const FracParams& params,
                                   const std::filesystem::path& cache_dir);

/// Gauss-Legendre rule on [-1,1]; used for near-field cell integrals.
void gauss_legendre(int npts, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fracond

#endif
