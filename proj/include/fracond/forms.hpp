#ifndef FRACOND_FORMS_HPP
#define FRACOND_FORMS_HPP

#include <Eigen/Dense>

#include "fracond/kernel.hpp"

namespace fracond {

/// Uniformly elliptic nodal conductivity with its derived fields. gamma is
/// taken to be identically one outside the box; construction therefore
/// rejects fields that deviate from one on the outermost cell ring, which
/// keeps the tail terms of the gamma-weighted and unweighted forms
/// consistent. `from_field_unchecked` skips the ring rule for synthetic
/// weight sets in tests.
class Conductivity {
  public:
    Conductivity() = default;  // empty until assigned from a factory

    static Conductivity from_field(const GridFunction& gamma);
    static Conductivity from_field_unchecked(const GridFunction& gamma);

    const GridFunction& gamma() const { return gamma_; }
    const GridFunction& sqrt_gamma() const { return sqrt_gamma_; }
    const GridFunction& inv_sqrt_gamma() const { return inv_sqrt_gamma_; }
    /// Background deviation m = gamma^{1/2} - 1.
    const GridFunction& deviation() const { return m_; }
    double lower_bound() const { return gamma0_; }
    const GridSpec& spec() const { return gamma_.spec; }

    static Conductivity constant_one(const GridSpec& spec);

  private:
    static Conductivity build(const GridFunction& gamma, bool check_ring);

    GridFunction gamma_, sqrt_gamma_, inv_sqrt_gamma_, m_;
    double gamma0_ = 0.0;
};

/// B_gamma(u,v) = sum_{i<j} 2 w_ij g_i^{1/2} g_j^{1/2} (u_i-u_j)(v_i-v_j)
///              + sum_i tau_i g_i^{1/2} u_i v_i.
double b_gamma(const KernelWeights& w, const Conductivity& cond,
               const GridFunction& u, const GridFunction& v);

/// The gamma == 1 case: the discrete <(-Delta)^{s/2}u, (-Delta)^{s/2}v>.
double b_one(const KernelWeights& w, const GridFunction& u, const GridFunction& v);

/// <q_gamma a, b> = -B_1(m, psi) with psi_i = gamma_i^{-1/2} a_i b_i.
double q_form(const KernelWeights& w, const Conductivity& cond,
              const GridFunction& a, const GridFunction& b);

/// B_q(a,b) = B_1(a,b) + q_form(a,b).
double schrodinger_form(const KernelWeights& w, const Conductivity& cond,
                        const GridFunction& a, const GridFunction& b);

/// E_gamma(u) = B_gamma(u,u).
double energy(const KernelWeights& w, const Conductivity& cond, const GridFunction& u);

/// |B_gamma(u,phi) - B_1(g^{1/2}u, g^{1/2}phi) - q_form(g^{1/2}u, g^{1/2}phi)|
/// / (1 + |B_gamma(u,phi)|). The identity holds per pair, so the result is
/// floating-point noise.
double liouville_residual(const KernelWeights& w, const Conductivity& cond,
                          const GridFunction& u, const GridFunction& phi);

/// Nodal potential q_i = -(Au)_i applied to m, divided by gamma^{1/2}:
/// q_i = -(A m)_i / gamma_i^{1/2}. The Schroedinger form matrix is the
/// unweighted form matrix plus h^n diag(q).
GridFunction potential(const KernelWeights& w, const Conductivity& cond);

enum class FormKind { conductivity, schrodinger };

/// Dense symmetric matrix of the chosen form over all nodes:
/// entry (i,j) = form(e_i, e_j).
struct FormMatrix {
    FormKind kind = FormKind::conductivity;
    Eigen::MatrixXd a;
};

FormMatrix assemble_form_matrix(const KernelWeights& w, const Conductivity& cond,
                                FormKind kind);

/// Matrix-free row application of the form operator:
/// out_i = sum_j form(e_i, e_j) x_j, without assembling the matrix.
GridFunction apply_form(const KernelWeights& w, const Conductivity& cond,
                        FormKind kind, const GridFunction& x);

/// Serial reference for apply_form, kept for testing the parallel path.
GridFunction apply_form_serial(const KernelWeights& w, const Conductivity& cond,
                               FormKind kind, const GridFunction& x);

double b_gamma_serial(const KernelWeights& w, const Conductivity& cond,
                      const GridFunction& u, const GridFunction& v);

}  // namespace fracond

#endif
