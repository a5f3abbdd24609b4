#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "sevo/quadrature.hpp"

namespace sevo {

enum class SpaceFamily { SpectralSine, PiecewiseLinearFE };

/// Finite-dimensional subspace V_n of W^{1,p}_0(0,1) with an
/// L^2-orthonormal basis, nested across n within a family.
///
/// SpectralSine: e_k(x) = sqrt(2) sin(k pi x), k = 1..n.
/// PiecewiseLinearFE: hat functions on the uniform mesh of width 1/n
/// (n dyadic), orthonormalized hierarchically so that the basis of V_n
/// is a prefix of the basis of V_{2n}.
struct DiscreteSpace {
    SpaceFamily family = SpaceFamily::SpectralSine;
    int n = 0;    // space index
    int dim = 0;  // number of basis functions
    QuadratureRule quad;

    Mat basis_vals;    // dim x nq: e_k(x_q)
    Mat basis_derivs;  // dim x nq: e_k'(x_q)
    Vec v_norm_sq;     // |e_k|_V^2 at p = 2 (convention for C_B)
    double c_b = 0.0;  // sum of v_norm_sq

    // FE only: nodal values of each basis function on the n+1 mesh points.
    Mat fe_nodal;

    double eval(const Vec& coeffs, double x) const;
    double eval_deriv(const Vec& coeffs, double x) const;
    double basis_at(int k, double x) const;
    double basis_deriv_at(int k, double x) const;

    /// Values of the coefficient vector's function at all quadrature
    /// nodes (and derivative values).
    Vec values_at_quad(const Vec& coeffs) const { return basis_vals.transpose() * coeffs; }
    Vec derivs_at_quad(const Vec& coeffs) const { return basis_derivs.transpose() * coeffs; }
};

/// Builds V_n. quadrature_order = 0 picks the default (4n points for
/// spectral, 4 points per cell for FE). Throws std::invalid_argument
/// for n = 0, non-dyadic FE n, or a quadrature too coarse to resolve
/// the Gram identity to 1e-10.
DiscreteSpace build_space(SpaceFamily family, int n, int quadrature_order = 0);

/// H-orthogonal projection of a callable profile onto V_n.
Vec project(const DiscreteSpace& space, const std::function<double(double)>& profile);

/// H-orthogonal projection of a finer-space element onto V_n.
Vec project(const DiscreteSpace& space, const DiscreteSpace& fine, const Vec& fine_coeffs);

/// |v|_H: Euclidean norm of coefficients (basis is H-orthonormal).
double h_norm(const Vec& coeffs);

/// |v|_V in W^{1,p}_0, by quadrature.
double v_norm(const DiscreteSpace& space, const Vec& coeffs, double p = 2.0);

/// |v|_V^p (avoids the p-th root when only the power is needed).
double v_norm_pow(const DiscreteSpace& space, const Vec& coeffs, double p = 2.0);

/// Dual norm on V_n of the functional with pairing coefficients f_k =
/// <f, e_k>, i.e. sup over unit-V-norm elements of V_n. Diagnostics
/// only; exact Riesz solve for p = 2, Fenchel ascent otherwise.
double dual_norm(const DiscreteSpace& space, const Vec& pairing_coeffs, double p = 2.0);

struct NormTriple {
    double h;
    double v;
    double dual;
};
NormTriple norms(const DiscreteSpace& space, const Vec& coeffs, double p = 2.0);

/// Stability index rho(n, m) = alpha * C_B(n) * delta_m.
double c_b_ratio(const DiscreteSpace& space, int m, double alpha, double T = 1.0);

}  // namespace sevo
