#include "sevo/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sevo/rng.hpp"

namespace sevo {

namespace {
const double kPi = std::acos(-1.0);
}

OperatorPair make_linear_heat(double mu_scale, const std::vector<double>& sigma) {
    if (mu_scale <= 0.0) throw std::invalid_argument("make_linear_heat: mu_scale must be > 0");
    OperatorPair pair;
    pair.r = static_cast<int>(sigma.size());
    pair.autonomous = true;
    pair.flux = [mu_scale](double, double, double z) { return mu_scale * z; };
    pair.flux_dz = [mu_scale](double, double, double) { return mu_scale; };
    pair.g = [](double, double, double, int) { return 0.0; };
    pair.h = [sigma](double, double x, double, int j) {
        return sigma[j] * std::sqrt(2.0) * std::sin((j + 1) * kPi * x);
    };

    double sig_sq = 0.0;
    for (double s : sigma) sig_sq += s * s;
    pair.constants.p = 2.0;
    pair.constants.alpha = 1.0;
    pair.constants.lambda_fn = [mu_scale](double) { return 2.0 * mu_scale; };
    pair.constants.k1_fn = [mu_scale](double) { return 2.0 * mu_scale; };
    pair.constants.k1bar_fn = [sig_sq](double) { return sig_sq; };
    pair.constants.k2_fn = [](double) { return 0.0; };
    return pair;
}

OperatorPair make_sign_flipped(double p, double a, const std::vector<double>& sigma) {
    if (p < 2.0) throw std::invalid_argument("make_sign_flipped: p must be >= 2");
    if (a <= 0.0) throw std::invalid_argument("make_sign_flipped: a must be > 0");
    OperatorPair pair;
    pair.r = static_cast<int>(sigma.size());
    pair.autonomous = true;
    pair.flux = [a, p](double, double, double z) {
        return -a * std::pow(std::abs(z), p - 2.0) * z;
    };
    pair.flux_dz = [a, p](double, double, double z) {
        return -a * (p - 1.0) * std::pow(std::abs(z), p - 2.0);
    };
    pair.g = [](double, double, double, int) { return 0.0; };
    pair.h = [sigma](double, double, double, int j) { return sigma[j]; };

    double sig_sq = 0.0;
    for (double s : sigma) sig_sq += s * s;
    // Constants the honest (unflipped) family would claim.
    pair.constants.p = p;
    pair.constants.alpha = 1.0;
    pair.constants.lambda_fn = [a](double) { return a; };
    pair.constants.k1_fn = [](double) { return 0.0; };
    pair.constants.k1bar_fn = [sig_sq](double) { return sig_sq; };
    pair.constants.k2_fn = [](double) { return 0.0; };
    return pair;
}

OperatorPair make_example_family(double p, Field a, std::vector<Field> b, std::vector<Field> c,
                                 std::vector<Field> d, double epsilon, double horizon) {
    if (p < 2.0) throw std::invalid_argument("make_example_family: p must be >= 2");
    if (epsilon <= 0.0) throw std::invalid_argument("make_example_family: epsilon must be > 0");

    const int r = static_cast<int>(std::max({b.size(), c.size(), d.size()}));
    auto field_at = [](const std::vector<Field>& fs, int k, double t, double x) {
        return (k < static_cast<int>(fs.size()) && fs[k]) ? fs[k](t, x) : 0.0;
    };

    // Positivity value of Example condition (2) in d = 1: the 1x1 matrix
    // 2(p-1)a - (1+eps) sum_k (b^k)^2.
    auto positivity = [=](double t, double x) {
        double bsq = 0.0;
        for (int k = 0; k < r; ++k) {
            double bk = field_at(b, k, t, x);
            bsq += bk * bk;
        }
        return 2.0 * (p - 1.0) * a(t, x) - (1.0 + epsilon) * bsq;
    };

    const int nt = 33, nx = 65;
    for (int it = 0; it <= nt; ++it) {
        double t = horizon * (it + 0.5) / (nt + 1);
        for (int ix = 1; ix < nx; ++ix) {
            double x = static_cast<double>(ix) / nx;
            if (positivity(t, x) < -1e-12)
                throw std::invalid_argument(
                    "make_example_family: positivity condition violated at sampled node");
        }
    }

    // coercivity weight lambda(t), from the constructive chain
    //   2 z f(z) - (1+eps) sum_k g^k(z)^2 >= lam_c(t) |z|^p,
    //   |u|_V^p <= 2 int |u'|^p  =>  lambda(t) = lam_c(t) / 2,
    // where lam_c(t) = min_x [ 2a - (1+eps)(4/p^2) sum (b^k)^2 ].
    auto lambda_fn = [=](double t) {
        double best = std::numeric_limits<double>::infinity();
        for (int ix = 1; ix < nx; ++ix) {
            double x = static_cast<double>(ix) / nx;
            double bsq = 0.0;
            for (int k = 0; k < r; ++k) {
                double bk = field_at(b, k, t, x);
                bsq += bk * bk;
            }
            double v = 2.0 * a(t, x) - (1.0 + epsilon) * (4.0 / (p * p)) * bsq;
            best = std::min(best, v);
        }
        return std::max(best, 1e-12) / 2.0;
    };

    // Empirical growth constant: sup over sampled (t, x) of a / lambda,
    // raised to q since |A(u)|_{V*}^q <= (sup a)^q |u|_V^p.
    double q = p / (p - 1.0);
    double alpha0 = 1.0;
    for (int it = 0; it <= nt; ++it) {
        double t = horizon * (it + 0.5) / (nt + 1);
        double lam = lambda_fn(t);
        double amax = 0.0;
        for (int ix = 1; ix < nx; ++ix) amax = std::max(amax, a(t, static_cast<double>(ix) / nx));
        alpha0 = std::max(alpha0, amax / lam);
    }
    const double alpha = std::max(1.0, std::pow(alpha0, q));

    auto sup_c_sq = [=](double t) {
        double best = 0.0;
        for (int ix = 1; ix < nx; ++ix) {
            double x = static_cast<double>(ix) / nx;
            double csq = 0.0;
            for (int k = 0; k < r; ++k) {
                double ck = field_at(c, k, t, x);
                csq += ck * ck;
            }
            best = std::max(best, csq);
        }
        return best;
    };
    auto int_d_sq = [=](double t) {
        double acc = 0.0;
        for (int ix = 1; ix < nx; ++ix) {
            double x = static_cast<double>(ix) / nx;
            double dsq = 0.0;
            for (int k = 0; k < r; ++k) {
                double dk = field_at(d, k, t, x);
                dsq += dk * dk;
            }
            acc += dsq / nx;
        }
        return acc;
    };

    OperatorPair pair;
    pair.r = r;
    pair.flux = [=](double t, double x, double z) {
        return a(t, x) * std::pow(std::abs(z), p - 2.0) * z;
    };
    pair.flux_dz = [=](double t, double x, double z) {
        return (p - 1.0) * a(t, x) * std::pow(std::abs(z), p - 2.0);
    };
    pair.g = [=](double t, double x, double z, int j) {
        return (2.0 / p) * field_at(b, j, t, x) * std::pow(std::abs(z), p / 2.0);
    };
    pair.h = [=](double t, double x, double u, int j) {
        return field_at(c, j, t, x) * std::abs(u) + field_at(d, j, t, x);
    };

    pair.constants.p = p;
    pair.constants.alpha = alpha;
    pair.constants.lambda_fn = lambda_fn;
    pair.constants.k1_fn = [=](double t) { return 2.0 * (1.0 + 1.0 / epsilon) * sup_c_sq(t); };
    pair.constants.k1bar_fn = [=](double t) { return 2.0 * (1.0 + 1.0 / epsilon) * int_d_sq(t); };
    pair.constants.k2_fn = [](double) { return 0.0; };
    return pair;
}

Vec assemble_drift(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u) {
    if (u.size() != space.dim) throw std::invalid_argument("assemble_drift: size mismatch");
    Vec du = space.derivs_at_quad(u);
    Vec f(space.quad.size());
    for (int q = 0; q < space.quad.size(); ++q)
        f[q] = space.quad.weights[q] * pair.flux(t, space.quad.nodes[q], du[q]);
    return -(space.basis_derivs * f);
}

Mat assemble_drift_jacobian(const OperatorPair& pair, const DiscreteSpace& space, double t,
                            const Vec& u) {
    if (!pair.flux_dz) throw std::logic_error("assemble_drift_jacobian: flux_dz not provided");
    Vec du = space.derivs_at_quad(u);
    Vec fz(space.quad.size());
    for (int q = 0; q < space.quad.size(); ++q)
        fz[q] = space.quad.weights[q] * pair.flux_dz(t, space.quad.nodes[q], du[q]);
    return -(space.basis_derivs * fz.asDiagonal() * space.basis_derivs.transpose());
}

Vec assemble_diffusion(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u,
                       int j) {
    if (u.size() != space.dim) throw std::invalid_argument("assemble_diffusion: size mismatch");
    Vec uv = space.values_at_quad(u);
    Vec du = space.derivs_at_quad(u);
    Vec b(space.quad.size());
    for (int q = 0; q < space.quad.size(); ++q) {
        double x = space.quad.nodes[q];
        b[q] = space.quad.weights[q] * (pair.g(t, x, du[q], j) + pair.h(t, x, uv[q], j));
    }
    return space.basis_vals * b;
}

double drift_pairing(const OperatorPair& pair, const DiscreteSpace& space, double t, const Vec& u,
                     const Vec& v) {
    Vec du = space.derivs_at_quad(u);
    Vec dv = space.derivs_at_quad(v);
    double acc = 0.0;
    for (int q = 0; q < space.quad.size(); ++q)
        acc -= space.quad.weights[q] * pair.flux(t, space.quad.nodes[q], du[q]) * dv[q];
    return acc;
}

double diffusion_h_norm_sq(const OperatorPair& pair, const DiscreteSpace& space, double t,
                           const Vec& u) {
    Vec uv = space.values_at_quad(u);
    Vec du = space.derivs_at_quad(u);
    double acc = 0.0;
    for (int j = 0; j < pair.r; ++j)
        for (int q = 0; q < space.quad.size(); ++q) {
            double x = space.quad.nodes[q];
            double bq = pair.g(t, x, du[q], j) + pair.h(t, x, uv[q], j);
            acc += space.quad.weights[q] * bq * bq;
        }
    return acc;
}

double diffusion_diff_h_norm_sq(const OperatorPair& pair, const DiscreteSpace& space, double t,
                                const Vec& u, const Vec& v) {
    Vec uv = space.values_at_quad(u), du = space.derivs_at_quad(u);
    Vec vv = space.values_at_quad(v), dv = space.derivs_at_quad(v);
    double acc = 0.0;
    for (int j = 0; j < pair.r; ++j)
        for (int q = 0; q < space.quad.size(); ++q) {
            double x = space.quad.nodes[q];
            double bq = pair.g(t, x, du[q], j) + pair.h(t, x, uv[q], j) -
                        pair.g(t, x, dv[q], j) - pair.h(t, x, vv[q], j);
            acc += space.quad.weights[q] * bq * bq;
        }
    return acc;
}

namespace {

// Fixed Gauss rule for the inner ds averages.
Vec time_average_drift(const OperatorPair& pair, const DiscreteSpace& space, double t0, double t1,
                       const Vec& u, int qpts) {
    if (pair.autonomous) return assemble_drift(pair, space, 0.5 * (t0 + t1), u);
    QuadratureRule rule = gauss_legendre(qpts, t0, t1);
    Vec acc = Vec::Zero(space.dim);
    for (int q = 0; q < rule.size(); ++q)
        acc += rule.weights[q] * assemble_drift(pair, space, rule.nodes[q], u);
    return acc / (t1 - t0);
}

}  // namespace

Vec AveragedOperators::a_tilde(int i, const Vec& u) const {
    if (i < 0 || i > grid.m) throw std::out_of_range("a_tilde: index out of range");
    if (i == 0) return Vec::Zero(space->dim);
    return time_average_drift(*pair, *space, grid.node(i - 1), grid.node(i), u, time_quad_points);
}

Vec AveragedOperators::a_fwd(int i, const Vec& u) const {
    if (i < 0 || i >= grid.m) throw std::out_of_range("a_fwd: index out of range");
    return time_average_drift(*pair, *space, grid.node(i), grid.node(i + 1), u, time_quad_points);
}

Vec AveragedOperators::b_tilde(int i, const Vec& u, int j) const {
    if (i < 0 || i > grid.m) throw std::out_of_range("b_tilde: index out of range");
    if (i == 0) return Vec::Zero(space->dim);
    if (pair->autonomous)
        return assemble_diffusion(*pair, *space, 0.5 * (grid.node(i - 1) + grid.node(i)), u, j);
    QuadratureRule rule = gauss_legendre(time_quad_points, grid.node(i - 1), grid.node(i));
    Vec acc = Vec::Zero(space->dim);
    for (int q = 0; q < rule.size(); ++q)
        acc += rule.weights[q] * assemble_diffusion(*pair, *space, rule.nodes[q], u, j);
    return acc / grid.delta();
}

Mat AveragedOperators::a_fwd_jacobian(int i, const Vec& u) const {
    if (i < 0 || i >= grid.m) throw std::out_of_range("a_fwd_jacobian: index out of range");
    if (pair->autonomous)
        return assemble_drift_jacobian(*pair, *space, 0.5 * (grid.node(i) + grid.node(i + 1)), u);
    QuadratureRule rule = gauss_legendre(time_quad_points, grid.node(i), grid.node(i + 1));
    Mat acc = Mat::Zero(space->dim, space->dim);
    for (int q = 0; q < rule.size(); ++q)
        acc += rule.weights[q] * assemble_drift_jacobian(*pair, *space, rule.nodes[q], u);
    return acc / grid.delta();
}

ConditionReport check_conditions(const OperatorPair& pair, const DiscreteSpace& space,
                                 int n_samples, std::uint64_t seed, double horizon,
                                 std::optional<std::function<double(double)>> relaxed_k, double tol) {
    if (n_samples < 1) throw std::invalid_argument("check_conditions: n_samples must be >= 1");
    ConditionReport rep;
    rep.n_samples = n_samples;
    rep.seed = seed;
    rep.has_relaxed = relaxed_k.has_value();

    auto record = [&](ConditionStats& st, double margin, int idx, bool first) {
        if (first || margin < st.min_margin) {
            st.min_margin = margin;
            st.worst_index = idx;
        }
        if (margin < -tol) ++st.violations;
    };

    const double p = pair.constants.p;
    const double q = pair.constants.q();
    for (int s = 0; s < n_samples; ++s) {
        Vec x(space.dim), y(space.dim);
        for (int k = 0; k < space.dim; ++k) {
            x[k] = rng::normal({seed, (std::uint64_t)s, (std::uint64_t)k, 0}) / (k + 1);
            y[k] = rng::normal({seed, (std::uint64_t)s, (std::uint64_t)k, 1}) / (k + 1);
        }
        double t = horizon * rng::to_unit(rng::fold({seed, (std::uint64_t)s, 2}));
        if (t == 0.0) t = horizon * 0.5;

        // Monotonicity: 0 >= 2 <x-y, A(x)-A(y)> + sum |B^j(x)-B^j(y)|_H^2
        Vec diff = x - y;
        double lhs_c1 = 2.0 * (drift_pairing(pair, space, t, x, diff) -
                               drift_pairing(pair, space, t, y, diff)) +
                        diffusion_diff_h_norm_sq(pair, space, t, x, y);
        record(rep.mono, -lhs_c1, s, s == 0);

        if (rep.has_relaxed) {
            double kv = (*relaxed_k)(t);
            record(rep.relaxed_mono, kv * diff.squaredNorm() - lhs_c1, s, s == 0);
        }

        // Coercivity: K1 |x|_H^2 + K1bar >= 2 <x, A(x)> + sum |B^j(x)|^2 + lambda |x|_V^p
        double lam = pair.constants.lambda_fn(t);
        double lhs_c2 = 2.0 * drift_pairing(pair, space, t, x, x) +
                        diffusion_h_norm_sq(pair, space, t, x) +
                        lam * v_norm_pow(space, x, p);
        double rhs_c2 = pair.constants.k1_fn(t) * x.squaredNorm() + pair.constants.k1bar_fn(t);
        record(rep.coercivity, rhs_c2 - lhs_c2, s, s == 0);

        // Growth: alpha lambda^q |x|_V^p + lambda^{q-1} K2 >= |A(x)|_{V*,n}^q
        Vec ax = assemble_drift(pair, space, t, x);
        double dual_q = std::pow(dual_norm(space, ax, p), q);
        double rhs_c4 = pair.constants.alpha * std::pow(lam, q) * v_norm_pow(space, x, p) +
                        std::pow(lam, q - 1.0) * pair.constants.k2_fn(t);
        record(rep.growth, rhs_c4 - dual_q, s, s == 0);

        // Derived bound: sum |B^j(x)|^2 <= (2 alpha + 1) lambda |x|_V^p + K1 |x|_H^2 + K3
        double rhs_r1 = (2.0 * pair.constants.alpha + 1.0) * lam * v_norm_pow(space, x, p) +
                        pair.constants.k1_fn(t) * x.squaredNorm() + pair.constants.k3(t);
        record(rep.diff_bound, rhs_r1 - diffusion_h_norm_sq(pair, space, t, x), s, s == 0);
    }
    return rep;
}

}  // namespace sevo
