#include "sevo/spaces.hpp"

#include <cmath>

namespace sevo {

namespace {

const double kPi = std::acos(-1.0);

bool is_dyadic(int n) { return n >= 2 && (n & (n - 1)) == 0; }

double hat(double x, double center, double halfwidth) {
    double t = 1.0 - std::abs(x - center) / halfwidth;
    return t > 0.0 ? t : 0.0;
}

// Piecewise-linear interpolation of nodal values on the uniform mesh
// {0, 1/n, ..., 1}.
double interp(const Vec& nodal, int n, double x) {
    if (x <= 0.0 || x >= 1.0) {
        if (x == 0.0) return nodal[0];
        if (x == 1.0) return nodal[n];
        return 0.0;
    }
    double s = x * n;
    int c = static_cast<int>(s);
    if (c >= n) c = n - 1;
    double t = s - c;
    return (1.0 - t) * nodal[c] + t * nodal[c + 1];
}

double interp_deriv(const Vec& nodal, int n, double x) {
    if (x < 0.0 || x > 1.0) return 0.0;
    double s = x * n;
    int c = static_cast<int>(s);
    if (c >= n) c = n - 1;
    return (nodal[c + 1] - nodal[c]) * n;
}

void check_gram_identity(const DiscreteSpace& s) {
    Mat g = s.basis_vals * s.quad.weights.asDiagonal() * s.basis_vals.transpose();
    double err = (g - Mat::Identity(s.dim, s.dim)).cwiseAbs().maxCoeff();
    if (err > 1e-10)
        throw std::invalid_argument(
            "build_space: quadrature too coarse, Gram identity off by " + std::to_string(err));
}

}  // namespace

double DiscreteSpace::basis_at(int k, double x) const {
    if (family == SpaceFamily::SpectralSine)
        return std::sqrt(2.0) * std::sin((k + 1) * kPi * x);
    return interp(fe_nodal.row(k).transpose(), n, x);
}

double DiscreteSpace::basis_deriv_at(int k, double x) const {
    if (family == SpaceFamily::SpectralSine)
        return std::sqrt(2.0) * (k + 1) * kPi * std::cos((k + 1) * kPi * x);
    return interp_deriv(fe_nodal.row(k).transpose(), n, x);
}

double DiscreteSpace::eval(const Vec& coeffs, double x) const {
    if (family == SpaceFamily::SpectralSine) {
        double v = 0.0;
        for (int k = 0; k < dim; ++k) v += coeffs[k] * basis_at(k, x);
        return v;
    }
    Vec nodal = fe_nodal.transpose() * coeffs;
    return interp(nodal, n, x);
}

double DiscreteSpace::eval_deriv(const Vec& coeffs, double x) const {
    if (family == SpaceFamily::SpectralSine) {
        double v = 0.0;
        for (int k = 0; k < dim; ++k) v += coeffs[k] * basis_deriv_at(k, x);
        return v;
    }
    Vec nodal = fe_nodal.transpose() * coeffs;
    return interp_deriv(nodal, n, x);
}

DiscreteSpace build_space(SpaceFamily family, int n, int quadrature_order) {
    if (n < 1) throw std::invalid_argument("build_space: n must be >= 1");

    DiscreteSpace s;
    s.family = family;
    s.n = n;

    if (family == SpaceFamily::SpectralSine) {
        s.dim = n;
        int pts = quadrature_order > 0 ? quadrature_order : std::max(4 * n, 32);
        s.quad = gauss_legendre(pts, 0.0, 1.0);
        const int nq = s.quad.size();
        s.basis_vals.resize(s.dim, nq);
        s.basis_derivs.resize(s.dim, nq);
        for (int k = 0; k < s.dim; ++k)
            for (int q = 0; q < nq; ++q) {
                double x = s.quad.nodes[q];
                s.basis_vals(k, q) = std::sqrt(2.0) * std::sin((k + 1) * kPi * x);
                s.basis_derivs(k, q) = std::sqrt(2.0) * (k + 1) * kPi * std::cos((k + 1) * kPi * x);
            }
    } else {
        if (!is_dyadic(n))
            throw std::invalid_argument("build_space: FE family requires dyadic n >= 2");
        s.dim = n - 1;
        int pts = quadrature_order > 0 ? quadrature_order : 4;
        s.quad = composite_gauss(pts, n, 0.0, 1.0);
        const int nq = s.quad.size();

        // Hierarchical hat functions: one level per dyadic refinement,
        // new nodes left to right within each level. This makes the
        // orthonormal basis of V_n a prefix of the basis of V_{2n}.
        Mat raw_nodal(s.dim, n + 1);
        raw_nodal.setZero();
        int row = 0;
        for (int lev = 2; lev <= n; lev *= 2) {
            double hw = 1.0 / lev;
            for (int j = 1; j < lev; j += 2) {
                double center = static_cast<double>(j) / lev;
                for (int i = 0; i <= n; ++i)
                    raw_nodal(row, i) = hat(static_cast<double>(i) / n, center, hw);
                ++row;
            }
        }

        Mat raw_vals(s.dim, nq);
        for (int k = 0; k < s.dim; ++k)
            for (int q = 0; q < nq; ++q)
                raw_vals(k, q) = interp(raw_nodal.row(k).transpose(), n, s.quad.nodes[q]);

        Mat gram = raw_vals * s.quad.weights.asDiagonal() * raw_vals.transpose();
        Eigen::LLT<Mat> llt(gram);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("build_space: hat Gram matrix not SPD");
        // Rows of L^{-1} * raw are orthonormal; the leading-block
        // structure of the Cholesky factor preserves the hierarchy.
        Mat lower = llt.matrixL();
        s.fe_nodal = lower.triangularView<Eigen::Lower>().solve(raw_nodal);
        s.basis_vals = lower.triangularView<Eigen::Lower>().solve(raw_vals);
        s.basis_derivs.resize(s.dim, nq);
        for (int k = 0; k < s.dim; ++k)
            for (int q = 0; q < nq; ++q)
                s.basis_derivs(k, q) = interp_deriv(s.fe_nodal.row(k).transpose(), n, s.quad.nodes[q]);
    }

    check_gram_identity(s);

    s.v_norm_sq.resize(s.dim);
    for (int k = 0; k < s.dim; ++k) {
        double acc = 0.0;
        for (int q = 0; q < s.quad.size(); ++q)
            acc += s.quad.weights[q] *
                   (s.basis_vals(k, q) * s.basis_vals(k, q) +
                    s.basis_derivs(k, q) * s.basis_derivs(k, q));
        s.v_norm_sq[k] = acc;
    }
    s.c_b = s.v_norm_sq.sum();
    return s;
}

Vec project(const DiscreteSpace& space, const std::function<double(double)>& profile) {
    const int nq = space.quad.size();
    Vec f(nq);
    for (int q = 0; q < nq; ++q) f[q] = profile(space.quad.nodes[q]);
    return space.basis_vals * space.quad.weights.cwiseProduct(f);
}

Vec project(const DiscreteSpace& space, const DiscreteSpace& fine, const Vec& fine_coeffs) {
    if (fine_coeffs.size() != fine.dim)
        throw std::invalid_argument("project: coefficient size mismatch");
    return project(space, [&](double x) { return fine.eval(fine_coeffs, x); });
}

double h_norm(const Vec& coeffs) { return coeffs.norm(); }

double v_norm_pow(const DiscreteSpace& space, const Vec& coeffs, double p) {
    if (coeffs.size() != space.dim)
        throw std::invalid_argument("v_norm: coefficient size mismatch");
    Vec u = space.values_at_quad(coeffs);
    Vec du = space.derivs_at_quad(coeffs);
    double acc = 0.0;
    if (p == 2.0) {
        for (int q = 0; q < space.quad.size(); ++q)
            acc += space.quad.weights[q] * (u[q] * u[q] + du[q] * du[q]);
    } else {
        for (int q = 0; q < space.quad.size(); ++q)
            acc += space.quad.weights[q] *
                   (std::pow(std::abs(u[q]), p) + std::pow(std::abs(du[q]), p));
    }
    return acc;
}

double v_norm(const DiscreteSpace& space, const Vec& coeffs, double p) {
    return std::pow(v_norm_pow(space, coeffs, p), 1.0 / p);
}

namespace {

// Gradient of N(c) = |v_c|_V^p with respect to coefficients.
Vec v_norm_pow_grad(const DiscreteSpace& space, const Vec& coeffs, double p) {
    Vec u = space.values_at_quad(coeffs);
    Vec du = space.derivs_at_quad(coeffs);
    Vec fu(space.quad.size()), fdu(space.quad.size());
    for (int q = 0; q < space.quad.size(); ++q) {
        fu[q] = space.quad.weights[q] * p * std::pow(std::abs(u[q]), p - 2.0) * u[q];
        fdu[q] = space.quad.weights[q] * p * std::pow(std::abs(du[q]), p - 2.0) * du[q];
    }
    return space.basis_vals * fu + space.basis_derivs * fdu;
}

}  // namespace

double dual_norm(const DiscreteSpace& space, const Vec& f, double p) {
    if (f.size() != space.dim) throw std::invalid_argument("dual_norm: size mismatch");
    if (f.norm() == 0.0) return 0.0;

    Mat gv = space.basis_vals * space.quad.weights.asDiagonal() * space.basis_vals.transpose() +
             space.basis_derivs * space.quad.weights.asDiagonal() * space.basis_derivs.transpose();
    Vec riesz = gv.ldlt().solve(f);
    if (p == 2.0) return std::sqrt(f.dot(riesz));

    // Fenchel: sup_c [ <f,c> - |c|_V^p / p ] = |f|_{V*}^q / q.
    const double q = p / (p - 1.0);
    Vec c = riesz;  // the p = 2 maximizer as a starting point
    double phi = f.dot(c) - v_norm_pow(space, c, p) / p;
    double step = 1.0;
    for (int it = 0; it < 400; ++it) {
        Vec grad = f - v_norm_pow_grad(space, c, p) / p;
        double gn = grad.norm();
        if (gn < 1e-13 * (1.0 + f.norm())) break;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            Vec trial = c + step * grad;
            double phit = f.dot(trial) - v_norm_pow(space, trial, p) / p;
            if (phit > phi) {
                c = trial;
                phi = phit;
                step *= 1.5;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return std::pow(std::max(q * phi, 0.0), 1.0 / q);
}

NormTriple norms(const DiscreteSpace& space, const Vec& coeffs, double p) {
    if (coeffs.size() != space.dim) throw std::invalid_argument("norms: size mismatch");
    NormTriple t;
    t.h = h_norm(coeffs);
    t.v = v_norm(space, coeffs, p);
    t.dual = dual_norm(space, coeffs, p);
    return t;
}

double c_b_ratio(const DiscreteSpace& space, int m, double alpha, double T) {
    if (m < 1) throw std::invalid_argument("c_b_ratio: m must be >= 1");
    if (alpha < 1.0) throw std::invalid_argument("c_b_ratio: alpha must be >= 1");
    return alpha * space.c_b * T / m;
}

}  // namespace sevo
