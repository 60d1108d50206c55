// Timing comparison of the OpenMP kernels against their serial reference
// implementations: operator application, form evaluation, DN assembly.

#include <omp.h>

#include <cstdio>
#include <random>

#include "fracond/dnmap.hpp"

using namespace fracond;

namespace {

GridFunction random_field(const GridSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    GridFunction u(spec);
    for (long i = 0; i < u.size(); ++i) u[i] = unif(rng);
    return u;
}

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        f();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

double bench_case(int dim, int n, double s) {
    GridSpec spec = build_grid(dim, 1.0, n);
    KernelWeights w = build_weights(spec, make_frac_params(dim, s));
    std::mt19937_64 rng(7);
    GridFunction u = random_field(spec, rng);
    GridFunction v = random_field(spec, rng);
    GridFunction g(spec, 1.0);
    for (long i = 0; i < g.size(); ++i) {
        auto p = spec.unflatten(i);
        const bool ring = p[0] == 0 || p[0] == n - 1 ||
                          (dim == 2 && (p[1] == 0 || p[1] == n - 1));
        if (!ring) g[i] = 1.5 + 0.4 * std::sin(static_cast<double>(i));
    }
    Conductivity cond = Conductivity::from_field(g);

    double sink = 0.0;
    const double t_apply_ser =
        time_best_of(3, [&] { sink += apply_frac_laplacian_serial(w, u)[0]; });
    const double t_apply_par =
        time_best_of(3, [&] { sink += apply_frac_laplacian(w, u)[0]; });
    const double t_form_ser = time_best_of(3, [&] { sink += b_gamma_serial(w, cond, u, v); });
    const double t_form_par = time_best_of(3, [&] { sink += b_gamma(w, cond, u, v); });

    std::printf("%dD N=%-4d s=%.2f  apply: serial %8.3f ms | omp %8.3f ms | x%.2f\n",
                dim, n, s, 1e3 * t_apply_ser, 1e3 * t_apply_par,
                t_apply_ser / t_apply_par);
    std::printf("               form:  serial %8.3f ms | omp %8.3f ms | x%.2f\n",
                1e3 * t_form_ser, 1e3 * t_form_par, t_form_ser / t_form_par);
    return sink;
}

void bench_dn(int dim, int n, double s) {
    GridSpec spec = build_grid(dim, 1.0, n);
    KernelWeights w = build_weights(spec, make_frac_params(dim, s));
    Box omega = dim == 1 ? Box::interval(-0.5, 0.5) : Box::rect(-0.5, 0.5, -0.5, 0.5);
    Box w1 = dim == 1 ? Box::interval(-0.95, -0.7) : Box::rect(-0.95, -0.7, -0.3, 0.3);
    Box w2 = dim == 1 ? Box::interval(0.7, 0.95) : Box::rect(0.7, 0.95, -0.3, 0.3);
    RegionLayout lay = define_regions(spec, omega, w1, w2, std::nullopt);
    Conductivity one = Conductivity::constant_one(spec);
    const double t = time_best_of(1, [&] { assemble_dn(w, one, lay, 1e-12); });
    std::printf("%dD N=%-4d s=%.2f  dn-assemble: %8.3f ms (%zu exterior columns)\n",
                dim, n, s, 1e3 * t, lay.exterior.size());
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());
    double checksum = 0.0;
    checksum += bench_case(1, 256, 0.45);
    checksum += bench_case(1, 512, 0.45);
    checksum += bench_case(2, 32, 0.5);
    checksum += bench_case(2, 48, 0.5);
    bench_dn(1, 256, 0.45);
    bench_dn(2, 32, 0.5);
    std::printf("checksum: %g\n", checksum);
    return 0;
}
