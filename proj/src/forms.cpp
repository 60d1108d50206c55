#include "fracond/forms.hpp"

#include <cmath>
#include <limits>

namespace fracond {

Conductivity Conductivity::build(const GridFunction& gamma, bool check_ring) {
    check_finite(gamma, "Conductivity");
    const GridSpec& spec = gamma.spec;
    double g0 = std::numeric_limits<double>::infinity();
    for (double g : gamma.values) {
        if (!(g > 0.0)) throw InvalidArgument("Conductivity: gamma must be positive at every node");
        g0 = std::min(g0, g);
    }
    if (check_ring) {
        const int n = spec.nodes_per_axis;
        for (long i = 0; i < spec.node_count(); ++i) {
            auto p = spec.unflatten(i);
            const bool ring = p[0] == 0 || p[0] == n - 1 ||
                              (spec.dim == 2 && (p[1] == 0 || p[1] == n - 1));
            if (ring && gamma[i] != 1.0)
                throw InvalidArgument(
                    "Conductivity: gamma must equal 1 on the outermost cell ring "
                    "(functions are extended by gamma == 1 outside the box)");
        }
    }
    Conductivity c;
    c.gamma_ = gamma;
    c.gamma0_ = g0;
    c.sqrt_gamma_ = GridFunction(spec);
    c.inv_sqrt_gamma_ = GridFunction(spec);
    c.m_ = GridFunction(spec);
    for (long i = 0; i < gamma.size(); ++i) {
        const double r = std::sqrt(gamma[i]);
        c.sqrt_gamma_[i] = r;
        c.inv_sqrt_gamma_[i] = 1.0 / r;
        c.m_[i] = r - 1.0;
    }
    return c;
}

Conductivity Conductivity::from_field(const GridFunction& gamma) {
    return build(gamma, true);
}

Conductivity Conductivity::from_field_unchecked(const GridFunction& gamma) {
    return build(gamma, false);
}

Conductivity Conductivity::constant_one(const GridSpec& spec) {
    return build(GridFunction(spec, 1.0), true);
}

namespace {

// Row sums over ordered pairs; every unordered pair enters twice, which is
// exactly the 2 w_ij factor of the forms.
template <bool Parallel, bool Weighted>
double pair_form(const KernelWeights& kw, const double* a, const double* u,
                 const double* v) {
    const GridSpec& spec = kw.spec();
    const long count = spec.node_count();
    const int n = spec.nodes_per_axis;
    const std::vector<double>& st = kw.stencil();
    double total = 0.0;

    if (spec.dim == 1) {
#pragma omp parallel for schedule(static) reduction(+ : total) if (Parallel)
        for (long i = 0; i < count; ++i) {
            double acc = 0.0;
            const double ui = u[i], vi = v[i];
            for (long j = 0; j < count; ++j) {
                if (j == i) continue;
                const long d = j > i ? j - i : i - j;
                double t = st[static_cast<std::size_t>(d)] * ((ui - u[j]) * (vi - v[j]));
                if constexpr (Weighted) t *= a[i] * a[j];
                acc += t;
            }
            total += acc;
        }
    } else {
#pragma omp parallel for schedule(static) reduction(+ : total) if (Parallel)
        for (long i = 0; i < count; ++i) {
            const int ix = static_cast<int>(i / n), iy = static_cast<int>(i % n);
            const double ui = u[i], vi = v[i];
            double acc = 0.0;
            for (int jx = 0; jx < n; ++jx) {
                const int dx = jx > ix ? jx - ix : ix - jx;
                const double* srow = st.data() + static_cast<std::size_t>(dx) * n;
                const long row = static_cast<long>(jx) * n;
                for (int jy = 0; jy < n; ++jy) {
                    if (jx == ix && jy == iy) continue;
                    const long j = row + jy;
                    const int dy = jy > iy ? jy - iy : iy - jy;
                    double t = srow[dy] * ((ui - u[j]) * (vi - v[j]));
                    if constexpr (Weighted) t *= a[i] * a[j];
                    acc += t;
                }
            }
            total += acc;
        }
    }
    return total;
}

template <bool Parallel>
double b_gamma_impl(const KernelWeights& kw, const Conductivity& cond,
                    const GridFunction& u, const GridFunction& v) {
    check_same_grid(kw.spec(), u.spec, "b_gamma");
    check_same_grid(u.spec, v.spec, "b_gamma");
    check_same_grid(cond.spec(), u.spec, "b_gamma");
    const double* a = cond.sqrt_gamma().values.data();
    double total = pair_form<Parallel, true>(kw, a, u.values.data(), v.values.data());
    const std::vector<double>& tail = kw.tail();
    for (long i = 0; i < u.size(); ++i)
        total += tail[static_cast<std::size_t>(i)] * a[i] * (u[i] * v[i]);
    return total;
}

template <bool Parallel>
double b_one_impl(const KernelWeights& kw, const GridFunction& u, const GridFunction& v) {
    check_same_grid(kw.spec(), u.spec, "b_one");
    check_same_grid(u.spec, v.spec, "b_one");
    double total = pair_form<Parallel, false>(kw, nullptr, u.values.data(), v.values.data());
    const std::vector<double>& tail = kw.tail();
    for (long i = 0; i < u.size(); ++i)
        total += tail[static_cast<std::size_t>(i)] * (u[i] * v[i]);
    return total;
}

}  // namespace

double b_gamma(const KernelWeights& kw, const Conductivity& cond,
               const GridFunction& u, const GridFunction& v) {
    if (deterministic()) return b_gamma_impl<false>(kw, cond, u, v);
    return b_gamma_impl<true>(kw, cond, u, v);
}

double b_gamma_serial(const KernelWeights& kw, const Conductivity& cond,
                      const GridFunction& u, const GridFunction& v) {
    return b_gamma_impl<false>(kw, cond, u, v);
}

double b_one(const KernelWeights& kw, const GridFunction& u, const GridFunction& v) {
    if (deterministic()) return b_one_impl<false>(kw, u, v);
    return b_one_impl<true>(kw, u, v);
}

double q_form(const KernelWeights& kw, const Conductivity& cond,
              const GridFunction& a, const GridFunction& b) {
    check_same_grid(cond.spec(), a.spec, "q_form");
    check_same_grid(a.spec, b.spec, "q_form");
    GridFunction psi(a.spec);
    const GridFunction& isg = cond.inv_sqrt_gamma();
    // grouping (a b) first keeps the form bit-symmetric in its arguments
    for (long i = 0; i < a.size(); ++i) psi[i] = isg[i] * (a[i] * b[i]);
    return -b_one(kw, cond.deviation(), psi);
}

double schrodinger_form(const KernelWeights& kw, const Conductivity& cond,
                        const GridFunction& a, const GridFunction& b) {
    return b_one(kw, a, b) + q_form(kw, cond, a, b);
}

double energy(const KernelWeights& kw, const Conductivity& cond, const GridFunction& u) {
    return b_gamma(kw, cond, u, u);
}

double liouville_residual(const KernelWeights& kw, const Conductivity& cond,
                          const GridFunction& u, const GridFunction& phi) {
    const double lhs = b_gamma(kw, cond, u, phi);
    const GridFunction au = pointwise_mul(cond.sqrt_gamma(), u);
    const GridFunction aphi = pointwise_mul(cond.sqrt_gamma(), phi);
    const double rhs = b_one(kw, au, aphi) + q_form(kw, cond, au, aphi);
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

GridFunction potential(const KernelWeights& kw, const Conductivity& cond) {
    GridFunction am = apply_frac_laplacian(kw, cond.deviation());
    GridFunction q(cond.spec());
    const GridFunction& isg = cond.inv_sqrt_gamma();
    for (long i = 0; i < q.size(); ++i) q[i] = -am[i] * isg[i];
    return q;
}

FormMatrix assemble_form_matrix(const KernelWeights& kw, const Conductivity& cond,
                                FormKind kind) {
    check_same_grid(kw.spec(), cond.spec(), "assemble_form_matrix");
    const GridSpec& spec = kw.spec();
    const long count = spec.node_count();
    FormMatrix fm;
    fm.kind = kind;
    fm.a.resize(count, count);
    const std::vector<double>& tail = kw.tail();
    const double* a = cond.sqrt_gamma().values.data();

    GridFunction q;
    if (kind == FormKind::schrodinger) q = potential(kw, cond);
    const double hn = spec.cell_volume();

#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
        double diag = 0.0;
        for (long j = 0; j < count; ++j) {
            if (j == i) continue;
            double w = kw.pair_weight(i, j);
            if (kind == FormKind::conductivity) w *= a[i] * a[j];
            fm.a(i, j) = -2.0 * w;
            diag += 2.0 * w;
        }
        if (kind == FormKind::conductivity) {
            diag += tail[static_cast<std::size_t>(i)] * a[i];
        } else {
            diag += tail[static_cast<std::size_t>(i)] + hn * q[i];
        }
        fm.a(i, i) = diag;
    }
    return fm;
}

namespace {

template <bool Parallel>
GridFunction apply_form_impl(const KernelWeights& kw, const Conductivity& cond,
                             FormKind kind, const GridFunction& x) {
    check_same_grid(kw.spec(), x.spec, "apply_form");
    check_same_grid(cond.spec(), x.spec, "apply_form");
    const GridSpec& spec = kw.spec();
    const long count = spec.node_count();
    const int n = spec.nodes_per_axis;
    const std::vector<double>& st = kw.stencil();
    const std::vector<double>& tail = kw.tail();
    const double* a = cond.sqrt_gamma().values.data();
    const double* xv = x.values.data();
    const bool weighted = kind == FormKind::conductivity;

    GridFunction q;
    if (kind == FormKind::schrodinger) q = potential(kw, cond);
    const double hn = spec.cell_volume();

    GridFunction out(spec);
#pragma omp parallel for schedule(static) if (Parallel)
    for (long i = 0; i < count; ++i) {
        const auto p = spec.unflatten(i);
        const double xi = xv[i];
        double acc = 0.0;
        if (spec.dim == 1) {
            for (long j = 0; j < count; ++j) {
                if (j == i) continue;
                const long d = j > i ? j - i : i - j;
                double t = st[static_cast<std::size_t>(d)] * (xi - xv[j]);
                if (weighted) t *= a[i] * a[j];
                acc += t;
            }
        } else {
            for (int jx = 0; jx < n; ++jx) {
                const int dx = jx > p[0] ? jx - p[0] : p[0] - jx;
                const double* srow = st.data() + static_cast<std::size_t>(dx) * n;
                const long row = static_cast<long>(jx) * n;
                for (int jy = 0; jy < n; ++jy) {
                    if (jx == p[0] && jy == p[1]) continue;
                    const long j = row + jy;
                    const int dy = jy > p[1] ? jy - p[1] : p[1] - jy;
                    double t = srow[dy] * (xi - xv[j]);
                    if (weighted) t *= a[i] * a[j];
                    acc += t;
                }
            }
        }
        double diag_extra;
        if (weighted)
            diag_extra = tail[static_cast<std::size_t>(i)] * a[i] * xi;
        else
            diag_extra = (tail[static_cast<std::size_t>(i)] + hn * q[i]) * xi;
        out[i] = 2.0 * acc + diag_extra;
    }
    return out;
}

}  // namespace

GridFunction apply_form(const KernelWeights& kw, const Conductivity& cond,
                        FormKind kind, const GridFunction& x) {
    if (deterministic()) return apply_form_impl<false>(kw, cond, kind, x);
    return apply_form_impl<true>(kw, cond, kind, x);
}

GridFunction apply_form_serial(const KernelWeights& kw, const Conductivity& cond,
                               FormKind kind, const GridFunction& x) {
    return apply_form_impl<false>(kw, cond, kind, x);
}

}  // namespace fracond
