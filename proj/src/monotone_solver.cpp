#include "sevo/monotone_solver.hpp"

#include <cmath>

namespace sevo {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double h = 1e-6 * (1.0 + x.norm());
    Vec f0 = f(x);
    Mat j(n, n);
    Vec xp = x;
    for (int c = 0; c < n; ++c) {
        xp[c] += h;
        j.col(c) = (f(xp) - f0) / h;
        xp[c] = x[c];
    }
    return j;
}

SolveResult solve(const MonotoneProblem& pr, const Vec& start) {
    SolveResult res;
    Vec x = start;
    Vec dx_resid = pr.apply_d(x) - pr.y;
    double resid = dx_resid.norm();
    res.residual_history.push_back(resid);

    double relax_tau = 0.5;
    int iter = 0;
    while (resid > pr.tolerance && iter < pr.max_iterations) {
        ++iter;
        Mat j = pr.jacobian ? pr.jacobian(x) : fd_jacobian(pr.apply_d, x);
        Vec step = j.partialPivLu().solve(-dx_resid);
        if (!step.allFinite()) step = -dx_resid;  // singular Jacobian

        bool accepted = false;
        Vec x_new, r_new;
        double tau = 1.0;
        for (int ls = 0; ls < 30 && !accepted; ++ls) {
            x_new = x + tau * step;
            r_new = pr.apply_d(x_new) - pr.y;
            if (r_new.allFinite() && r_new.squaredNorm() < dx_resid.squaredNorm() * (1.0 - 1e-4 * tau))
                accepted = true;
            else
                tau *= 0.5;
        }
        if (!accepted) {
            // Relaxation on the strongly monotone field D - y.
            for (int ls = 0; ls < 40 && !accepted; ++ls) {
                x_new = x - relax_tau * dx_resid;
                r_new = pr.apply_d(x_new) - pr.y;
                if (r_new.allFinite() && r_new.squaredNorm() < dx_resid.squaredNorm())
                    accepted = true;
                else
                    relax_tau *= 0.5;
            }
            relax_tau *= 1.3;
        }
        if (!accepted) break;  // no progress in either phase

        Vec dstep = x_new - x;
        double pairing = (r_new - dx_resid).dot(dstep);
        if (pairing < -1e-9 * dstep.squaredNorm()) {
            res.x = x_new;
            res.iterations = iter;
            res.final_residual = r_new.norm();
            res.status = SolveStatus::NonMonotoneDetected;
            res.residual_history.push_back(res.final_residual);
            return res;
        }

        x = x_new;
        dx_resid = r_new;
        resid = dx_resid.norm();
        res.residual_history.push_back(resid);
    }

    res.x = x;
    res.iterations = iter;
    res.final_residual = resid;
    res.status = resid <= pr.tolerance ? SolveStatus::Converged : SolveStatus::MaxIterations;
    return res;
}

NormBoundCheck verify_norm_bound(const DiscreteSpace& space, double p, double c1, double c2,
                                 const Vec& x, const Vec& y) {
    if (c1 <= 0.0) throw std::invalid_argument("verify_norm_bound: C1 must be > 0");
    NormBoundCheck chk;
    chk.value = v_norm_pow(space, x, p);
    double y_dual = dual_norm(space, y, p);
    chk.bound = (c1 + 2.0 * c2) / c1 + y_dual * y_dual / (c1 * c1);
    chk.margin = chk.bound - chk.value;
    chk.ok = chk.margin >= 0.0;
    return chk;
}

WellposednessWindow wellposedness_window(const StructuralConstants& constants,
                                         const TimeGrid& grid, int quad_points) {
    WellposednessWindow w;
    w.step_ok.resize(grid.m);
    for (int i = 0; i < grid.m; ++i) {
        QuadratureRule rule = gauss_legendre(quad_points, grid.node(i), grid.node(i + 1));
        double integral = 0.0;
        for (int q = 0; q < rule.size(); ++q)
            integral += rule.weights[q] * constants.k1_fn(rule.nodes[q]);
        w.step_ok[i] = integral < 2.0;
        if (!w.step_ok[i]) w.all_ok = false;
    }
    return w;
}

}  // namespace sevo
