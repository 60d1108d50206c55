#include "fracond/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracond {

double frac_constant(int dim, double s) {
    if (dim != 1 && dim != 2)
        throw InvalidArgument("frac_constant: dim must be 1 or 2");
    if (!(s > 0.0) || !(s < 1.0))
        throw InvalidArgument("frac_constant: s must lie in (0,1), got " + std::to_string(s));
    const double n = dim;
    return std::pow(4.0, s) * std::tgamma(n / 2.0 + s) /
           (std::pow(std::numbers::pi, n / 2.0) * std::abs(std::tgamma(-s)));
}

FracParams make_frac_params(int dim, double s) {
    return FracParams{dim, s, frac_constant(dim, s)};
}

void FracParams::require_subcritical(const char* where) const {
    if (!(s < dim / 2.0)) {
        std::ostringstream msg;
        msg << where << ": needs s < dim/2 (s = " << s << ", dim = " << dim << ")";
        throw InvalidArgument(msg.str());
    }
}

void gauss_legendre(int npts, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(npts), 0.0);
    weights.assign(static_cast<std::size_t>(npts), 0.0);
    for (int k = 0; k < npts; ++k) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (k + 0.75) / (npts + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= npts; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = npts * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(k)] = x;
        weights[static_cast<std::size_t>(k)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

constexpr int kNearGaussPts = 10;   // >= 4 per axis required for 2D near field
constexpr int kTailArcPts = 32;     // Gauss points per smooth angular arc

// Int over the adjacent 1D cell of |x_i - y|^{-(1+2s)} dy. The cell spans
// distances [h/2, 3h/2] from the node.
double near_cell_integral_1d(double h, double s) {
    double a = 0.5 * h, b = 1.5 * h;
    return (std::pow(a, -2.0 * s) - std::pow(b, -2.0 * s)) / (2.0 * s);
}

// Int over the 2D cell centered at (dx*h, dy*h) of |y|^{-(2+2s)} dy,
// tensor Gauss; the singularity sits outside the cell for |offset| >= 1.
double near_cell_integral_2d(double h, double s, int dx, int dy,
                             const std::vector<double>& gx,
                             const std::vector<double>& gw) {
    const double cx = dx * h, cy = dy * h;
    const double half = 0.5 * h;
    double acc = 0.0;
    for (int a = 0; a < kNearGaussPts; ++a) {
        const double ya = cx + half * gx[static_cast<std::size_t>(a)];
        const double wa = half * gw[static_cast<std::size_t>(a)];
        for (int b = 0; b < kNearGaussPts; ++b) {
            const double yb = cy + half * gx[static_cast<std::size_t>(b)];
            const double wb = half * gw[static_cast<std::size_t>(b)];
            const double r2 = ya * ya + yb * yb;
            acc += wa * wb * std::pow(r2, -(1.0 + s));
        }
    }
    return acc;
}

// Distance from an interior point to the box boundary along (cos t, sin t).
double box_exit_distance(double x, double y, double L, double ct, double st) {
    double r = std::numeric_limits<double>::infinity();
    if (ct > 0.0) r = std::min(r, (L - x) / ct);
    if (ct < 0.0) r = std::min(r, (-L - x) / ct);
    if (st > 0.0) r = std::min(r, (L - y) / st);
    if (st < 0.0) r = std::min(r, (-L - y) / st);
    return r;
}

}  // namespace

KernelWeights build_weights(const GridSpec& spec, const FracParams& params) {
    if (spec.dim != params.dim)
        throw InvalidArgument("build_weights: grid and params disagree on dim");
    const double h = spec.spacing();
    const double s = params.s;
    const double c_half = 0.5 * params.c_ns;
    const int n = spec.nodes_per_axis;

    KernelWeights kw;
    kw.spec_ = spec;
    kw.params_ = params;

    if (spec.dim == 1) {
        kw.stencil_.assign(static_cast<std::size_t>(n), 0.0);
        kw.stencil_[1] = c_half * h * near_cell_integral_1d(h, s);
        for (int d = 2; d < n; ++d)
            kw.stencil_[static_cast<std::size_t>(d)] =
                c_half * h * h * std::pow(d * h, -(1.0 + 2.0 * s));
    } else {
        std::vector<double> gx, gw;
        gauss_legendre(kNearGaussPts, gx, gw);
        kw.stencil_.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int dx = 0; dx < n; ++dx) {
            for (int dy = 0; dy < n; ++dy) {
                if (dx == 0 && dy == 0) continue;
                double w;
                if (dx <= 1 && dy <= 1) {
                    w = c_half * h * h * near_cell_integral_2d(h, s, dx, dy, gx, gw);
                } else {
                    const double r2 = (static_cast<double>(dx) * dx +
                                       static_cast<double>(dy) * dy) * h * h;
                    w = c_half * h * h * h * h * std::pow(r2, -(1.0 + s));
                }
                kw.stencil_[static_cast<std::size_t>(dx) * n + dy] = w;
            }
        }
    }

    const long count = spec.node_count();
    kw.tail_.assign(static_cast<std::size_t>(count), 0.0);
    const double L = spec.half_width;
    const double hn = spec.cell_volume();
    if (spec.dim == 1) {
        for (long i = 0; i < count; ++i) {
            const double x = spec.axis_coord(static_cast<int>(i));
            kw.tail_[static_cast<std::size_t>(i)] =
                params.c_ns * hn *
                (std::pow(L - x, -2.0 * s) + std::pow(L + x, -2.0 * s)) / (2.0 * s);
        }
    } else {
        // The angular integrand r_exit(theta)^{-2s} is smooth except at the
        // four corner directions, so Gauss on each corner-to-corner arc
        // resolves it to machine precision.
        std::vector<double> gx, gw;
        gauss_legendre(kTailArcPts, gx, gw);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < count; ++i) {
            const auto p = spec.node(i);
            double corners[4] = {std::atan2(L - p[1], L - p[0]),
                                 std::atan2(L - p[1], -L - p[0]),
                                 std::atan2(-L - p[1], -L - p[0]),
                                 std::atan2(-L - p[1], L - p[0])};
            std::sort(corners, corners + 4);
            double acc = 0.0;
            for (int arc = 0; arc < 4; ++arc) {
                const double a = corners[arc];
                const double b = arc == 3 ? corners[0] + 2.0 * std::numbers::pi
                                          : corners[arc + 1];
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                for (int k = 0; k < kTailArcPts; ++k) {
                    const double t = mid + half * gx[static_cast<std::size_t>(k)];
                    const double rex = box_exit_distance(p[0], p[1], L, std::cos(t),
                                                         std::sin(t));
                    acc += half * gw[static_cast<std::size_t>(k)] *
                           std::pow(rex, -2.0 * s);
                }
            }
            kw.tail_[static_cast<std::size_t>(i)] =
                params.c_ns * hn * acc / (2.0 * s);
        }
    }
    return kw;
}

namespace {

template <bool Parallel>
GridFunction apply_impl(const KernelWeights& kw, const GridFunction& u) {
    check_same_grid(kw.spec(), u.spec, "apply_frac_laplacian");
    const GridSpec& spec = kw.spec();
    const long count = spec.node_count();
    const double inv_hn = 1.0 / spec.cell_volume();
    GridFunction out(spec);
    const int n = spec.nodes_per_axis;
    const std::vector<double>& st = kw.stencil();
    const std::vector<double>& tail = kw.tail();
    const double* uv = u.values.data();

    if (spec.dim == 1) {
#pragma omp parallel for schedule(static) if (Parallel)
        for (long i = 0; i < count; ++i) {
            double acc = 0.0;
            const double ui = uv[i];
            for (long j = 0; j < count; ++j) {
                if (j == i) continue;
                long d = j > i ? j - i : i - j;
                acc += st[static_cast<std::size_t>(d)] * (ui - uv[j]);
            }
            out[i] = inv_hn * (2.0 * acc + tail[static_cast<std::size_t>(i)] * ui);
        }
    } else {
#pragma omp parallel for schedule(static) if (Parallel)
        for (long i = 0; i < count; ++i) {
            const int ix = static_cast<int>(i / n), iy = static_cast<int>(i % n);
            const double ui = uv[i];
            double acc = 0.0;
            for (int jx = 0; jx < n; ++jx) {
                const int dx = jx > ix ? jx - ix : ix - jx;
                const double* urow = uv + static_cast<long>(jx) * n;
                const double* srow = st.data() + static_cast<std::size_t>(dx) * n;
                for (int jy = 0; jy < n; ++jy) {
                    if (jx == ix && jy == iy) continue;
                    const int dy = jy > iy ? jy - iy : iy - jy;
                    acc += srow[dy] * (ui - urow[jy]);
                }
            }
            out[i] = inv_hn * (2.0 * acc + tail[static_cast<std::size_t>(i)] * ui);
        }
    }
    return out;
}

}  // namespace

GridFunction apply_frac_laplacian(const KernelWeights& kw, const GridFunction& u) {
    if (deterministic()) return apply_impl<false>(kw, u);
    return apply_impl<true>(kw, u);
}

GridFunction apply_frac_laplacian_serial(const KernelWeights& kw, const GridFunction& u) {
    return apply_impl<false>(kw, u);
}

GridFunction mollify(const GridSpec& spec, const GridFunction& u, double radius) {
    check_same_grid(spec, u.spec, "mollify");
    const double h = spec.spacing();
    if (radius < h)
        throw InvalidArgument("mollify: radius must be at least one cell width");
    const int reach = static_cast<int>(std::floor(radius / h));
    const int n = spec.nodes_per_axis;

    // normalized bump stencil over index offsets
    std::vector<std::array<int, 2>> offsets;
    std::vector<double> wts;
    double total = 0.0;
    for (int dx = -reach; dx <= reach; ++dx) {
        const int dy_lo = spec.dim == 1 ? 0 : -reach;
        const int dy_hi = spec.dim == 1 ? 0 : reach;
        for (int dy = dy_lo; dy <= dy_hi; ++dy) {
            const double r2 = (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) *
                              h * h / (radius * radius);
            if (r2 >= 1.0) continue;
            const double w = std::exp(-1.0 / (1.0 - r2));
            offsets.push_back({dx, dy});
            wts.push_back(w);
            total += w;
        }
    }
    const double hn = spec.cell_volume();
    for (double& w : wts) w /= total * hn;

    GridFunction out(spec);
    const long count = spec.node_count();
#pragma omp parallel for schedule(static) if (!deterministic())
    for (long i = 0; i < count; ++i) {
        const auto p = spec.unflatten(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const int jx = p[0] + offsets[k][0];
            const int jy = p[1] + offsets[k][1];
            if (jx < 0 || jx >= n) continue;
            if (spec.dim == 2 && (jy < 0 || jy >= n)) continue;
            acc += wts[k] * u[spec.flatten(jx, jy)];
        }
        out[i] = acc * hn;
    }
    return out;
}

// --- cache ----------------------------------------------------------------

namespace {
constexpr char kWeightsMagic[4] = {'F', 'C', 'K', 'W'};
constexpr std::int32_t kWeightsVersion = 1;
}  // namespace

void save_weights(const KernelWeights& w, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_weights: cannot open " + path.string());
    out.write(kWeightsMagic, 4);
    const std::int32_t ver = kWeightsVersion, dim = w.spec().dim, n = w.spec().nodes_per_axis;
    const double L = w.spec().half_width, s = w.params().s;
    out.write(reinterpret_cast<const char*>(&ver), sizeof ver);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    out.write(reinterpret_cast<const char*>(&s), sizeof s);
    auto write_vec = [&](const std::vector<double>& v) {
        const std::uint64_t len = v.size();
        out.write(reinterpret_cast<const char*>(&len), sizeof len);
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_vec(w.stencil());
    write_vec(w.tail());
    if (!out) throw IoError("save_weights: write failed for " + path.string());
}

std::optional<KernelWeights> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kWeightsMagic, 4) != 0) return std::nullopt;
    std::int32_t ver, dim, n;
    double L, s;
    in.read(reinterpret_cast<char*>(&ver), sizeof ver);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    in.read(reinterpret_cast<char*>(&s), sizeof s);
    if (!in || ver != kWeightsVersion) return std::nullopt;
    KernelWeights kw;
    kw.spec_ = build_grid(dim, L, n);
    kw.params_ = make_frac_params(dim, s);
    auto read_vec = [&](std::vector<double>& v) {
        std::uint64_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof len);
        v.assign(len, 0.0);
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(len * sizeof(double)));
    };
    read_vec(kw.stencil_);
    read_vec(kw.tail_);
    if (!in) return std::nullopt;
    return kw;
}

KernelWeights build_weights_cached(const GridSpec& spec, const FracParams& params,
                                   const std::filesystem::path& cache_dir) {
    std::uint64_t lbits, sbits;
    std::memcpy(&lbits, &spec.half_width, sizeof lbits);
    std::memcpy(&sbits, &params.s, sizeof sbits);
    std::ostringstream name;
    name << "kw_d" << spec.dim << "_N" << spec.nodes_per_axis << "_L" << std::hex
         << lbits << "_s" << sbits << "_v" << std::dec << kWeightsVersion << ".bin";
    const auto path = cache_dir / name.str();
    if (auto cached = load_weights(path)) {
        if (cached->spec().same_grid(spec) && cached->params().s == params.s)
            return *cached;
    }
    KernelWeights kw = build_weights(spec, params);
    std::filesystem::create_directories(cache_dir);
    save_weights(kw, path);
    return kw;
}

}  // namespace fracond
