#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sevo/spaces.hpp"
#include "sevo/timegrid.hpp"

namespace sevo {

/// Scalar coefficient field on [0,T] x (0,1).
using Field = std::function<double(double t, double x)>;

/// Structural constants of an operator pair: growth exponent p (with
/// conjugate q), growth constant alpha, coercivity weight lambda(t) and
/// the integrable functions K1, K1bar, K2.
struct StructuralConstants {
    double p = 2.0;
    double alpha = 1.0;
    std::function<double(double)> lambda_fn;
    std::function<double(double)> k1_fn;
    std::function<double(double)> k1bar_fn;
    std::function<double(double)> k2_fn;

    double q() const { return p / (p - 1.0); }
    double k3(double t) const { return k1bar_fn(t) + (2.0 / q()) * k2_fn(t); }
};

/// Drift/diffusion pair on (0,1):
///   <A_t(u), phi> = -int flux(t, x, u'(x)) phi'(x) dx   (divergence form)
///   B^j_t(u)(x)   = g(t, x, u'(x), j) + h(t, x, u(x), j)
struct OperatorPair {
    StructuralConstants constants;
    int r = 0;
    bool autonomous = false;  // enables single-evaluation time averages

    std::function<double(double t, double x, double z)> flux;
    std::function<double(double t, double x, double z)> flux_dz;  // may be empty
    std::function<double(double t, double x, double z, int j)> g;
    std::function<double(double t, double x, double u, int j)> h;
};

/// Heat drift A(u) = mu u'' with additive per-mode noise B^j = sigma_j e_j
/// (spectral sine modes). Constants: p = 2, lambda = 2 mu, K1 = 2 mu,
/// K1bar = sum sigma_j^2, K2 = 0, alpha = 1.
OperatorPair make_linear_heat(double mu_scale, const std::vector<double>& sigma);

/// 1-D nonlinear family
///   f(t,x,z)   = a(t,x) |z|^{p-2} z
///   g^k(t,x,z) = (2/p) b^k(t,x) |z|^{p/2}
///   h^k(t,x,u) = c^k(t,x) |u| + d^k(t,x)
/// Throws if the positivity value 2(p-1)a - (1+eps) sum (b^k)^2 drops
/// below -1e-12 at any sampled (t, x) node.
OperatorPair make_example_family(double p, Field a, std::vector<Field> b, std::vector<Field> c,
                                 std::vector<Field> d, double epsilon, double horizon = 1.0);

/// Adversarial pair: drift with the wrong sign, f = -a |z|^{p-2} z,
/// additive noise sigma_j, but the constants the honest family would
/// claim. Monotonicity and coercivity fail by construction; used to
/// exercise violation detection.
OperatorPair make_sign_flipped(double p, double a, const std::vector<double>& sigma);

/// Coefficients of Pi_n A_t(u) in the H-orthonormal basis: entry k is
/// <A_t(u), e_k> by quadrature.
Vec assemble_drift(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u);

/// d/du of assemble_drift (analytic; requires flux_dz).
Mat assemble_drift_jacobian(const OperatorPair& pair, const DiscreteSpace& space, double t,
                            const Vec& u);

/// Coefficients of Pi_n B^j_t(u).
Vec assemble_diffusion(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u,
                       int j);

/// <A_t(u), v> for u, v in V_n, directly by quadrature.
double drift_pairing(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u,
                     const Vec& v);

/// sum_j |B^j_t(u)|_H^2, full H-norm by quadrature (not the projection).
double diffusion_h_norm_sq(const OperatorPair& pair, const DiscreteSpace& space, double t,
                           const Vec& u);

double diffusion_diff_h_norm_sq(const OperatorPair& pair, const DiscreteSpace& space, double t,
                                const Vec& u, const Vec& v);

/// Time-averaged operators on the grid: backward averages (zero at
/// i = 0) for the explicit scheme and the noise term, forward averages
/// for the implicit drift. Inner ds integrals use a fixed Gauss rule.
struct AveragedOperators {
    const OperatorPair* pair = nullptr;
    const DiscreteSpace* space = nullptr;
    TimeGrid grid;
    int time_quad_points = 4;

    Vec a_tilde(int i, const Vec& u) const;                // avg over [t_{i-1}, t_i]
    Vec a_fwd(int i, const Vec& u) const;                  // avg over [t_i, t_{i+1}]
    Vec b_tilde(int i, const Vec& u, int j) const;         // backward avg, 0 at i = 0
    Mat a_fwd_jacobian(int i, const Vec& u) const;
};

struct ConditionStats {
    double min_margin = 0.0;  // min over samples of RHS - LHS; negative = violation
    int violations = 0;       // samples with margin < -tol
    int worst_index = -1;
};

struct ConditionReport {
    ConditionStats mono;
    ConditionStats relaxed_mono;  // only meaningful when a K(t) was supplied
    ConditionStats coercivity;
    ConditionStats growth;
    ConditionStats diff_bound;  // derived diffusion bound
    bool has_relaxed = false;
    int n_samples = 0;
    std::uint64_t seed = 0;
};

/// Samples random pairs (x, y) in V_n (coefficients N(0, k^{-2})) and
/// random t in (0, T], and evaluates the margins of the monotonicity,
/// coercivity, growth and derived diffusion bounds. Violations are
/// data, not errors.
ConditionReport check_conditions(const OperatorPair& pair, const DiscreteSpace& space,
                                 int n_samples, std::uint64_t seed, double horizon = 1.0,
                                 std::optional<std::function<double(double)>> relaxed_k = {},
                                 double tol = 1e-8);

}  // namespace sevo
