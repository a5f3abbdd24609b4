#include "sevo/schemes.hpp"

#include <cmath>

namespace sevo {

double kappa(const TimeGrid& grid, double t, int which) {
    if (which == 1) return grid.kappa1(t);
    if (which == 2) return grid.kappa2(t);
    throw std::invalid_argument("kappa: which must be 1 or 2");
}

namespace {

void record_norms(Trajectory& traj, int node, const DiscreteSpace& space, double p,
                  const SchemeOptions& opts) {
    if (!opts.record_diagnostics) return;
    traj.diagnostics[node].h_norm = h_norm(traj.values[node]);
    traj.diagnostics[node].v_norm = v_norm(space, traj.values[node], p);
}

// Per-step coercivity constants of D from the pair's coercivity functions:
// <D(x), x> >= (1/2 int lambda) |x|_V^p - (1/2 int K1bar), valid on the
// wellposedness window int K1 < 2.
void step_coercivity(const OperatorPair& pair, double t0, double t1, double& c1, double& c2) {
    QuadratureRule rule = gauss_legendre(8, t0, t1);
    double lam = 0.0, k1bar = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        lam += rule.weights[q] * pair.constants.lambda_fn(rule.nodes[q]);
        k1bar += rule.weights[q] * pair.constants.k1bar_fn(rule.nodes[q]);
    }
    c1 = 0.5 * lam;
    c2 = 0.5 * k1bar;
}

Trajectory run_implicit(SchemeKind kind, const DiscreteSpace& space, const TimeGrid& grid,
                        const OperatorPair& pair, const Vec& u0, const Mat& dW,
                        const SchemeOptions& opts) {
    if (u0.size() != space.dim) throw std::invalid_argument("run_implicit: u0 size mismatch");
    if (dW.rows() != pair.r || dW.cols() < grid.m)
        throw std::invalid_argument("run_implicit: increment matrix shape mismatch");

    Trajectory traj;
    traj.scheme = kind;
    traj.grid = grid;
    traj.space = &space;
    traj.values.assign(grid.m + 1, Vec::Zero(space.dim));
    traj.diagnostics.assign(grid.m + 1, {});
    traj.wellposed_ok = wellposedness_window(pair.constants, grid).all_ok;

    AveragedOperators avg{&pair, &space, grid, opts.time_quad_points};
    const double delta = grid.delta();
    const double p = pair.constants.p;
    record_norms(traj, 0, space, p, opts);

    Vec warm = u0;
    for (int i = 0; i < grid.m; ++i) {
        Vec y;
        if (i == 0) {
            y = u0;  // u(t_0) = 0, u_0 injected at the first solve
        } else {
            y = traj.values[i];
            for (int j = 0; j < pair.r; ++j)
                y += avg.b_tilde(i, traj.values[i], j) * dW(j, i);
        }
        if (!y.allFinite()) {
            traj.aborted = true;
            traj.abort_step = i + 1;
            traj.abort_reason = "NonFinite";
            return traj;
        }

        MonotoneProblem problem;
        problem.y = y;
        problem.apply_d = [&avg, i, delta](const Vec& x) { return Vec(x - delta * avg.a_fwd(i, x)); };
        if (pair.flux_dz) {
            const int dim = space.dim;
            problem.jacobian = [&avg, i, delta, dim](const Vec& x) {
                return Mat(Mat::Identity(dim, dim) - delta * avg.a_fwd_jacobian(i, x));
            };
        }
        step_coercivity(pair, grid.node(i), grid.node(i + 1), problem.coer_c1, problem.coer_c2);
        problem.tolerance = opts.solver_tolerance;
        problem.max_iterations = opts.solver_max_iterations;

        SolveResult sol = solve(problem, warm);
        if (sol.status != SolveStatus::Converged) {
            traj.aborted = true;
            traj.abort_step = i + 1;
            traj.abort_reason = sol.status == SolveStatus::MaxIterations
                                    ? "SolverFailure:MaxIterations"
                                    : "SolverFailure:NonMonotoneDetected";
            return traj;
        }
        traj.values[i + 1] = sol.x;
        warm = sol.x;
        if (opts.record_diagnostics) {
            traj.diagnostics[i + 1].solver_iterations = sol.iterations;
            traj.diagnostics[i + 1].residual = sol.final_residual;
        }
        record_norms(traj, i + 1, space, p, opts);
    }
    return traj;
}

}  // namespace

Trajectory run_explicit(const DiscreteSpace& space, const TimeGrid& grid, const OperatorPair& pair,
                        const Vec& u0, const Mat& dW, const SchemeOptions& opts) {
    if (u0.size() != space.dim) throw std::invalid_argument("run_explicit: u0 size mismatch");
    if (dW.rows() != pair.r || dW.cols() < grid.m)
        throw std::invalid_argument("run_explicit: increment matrix shape mismatch");

    Trajectory traj;
    traj.scheme = SchemeKind::ExplicitSpaceTime;
    traj.grid = grid;
    traj.space = &space;
    traj.values.assign(grid.m + 1, u0);
    traj.diagnostics.assign(grid.m + 1, {});

    AveragedOperators avg{&pair, &space, grid, opts.time_quad_points};
    const double delta = grid.delta();
    const double p = pair.constants.p;
    record_norms(traj, 0, space, p, opts);
    record_norms(traj, 1, space, p, opts);

    for (int i = 1; i < grid.m; ++i) {
        Vec next = traj.values[i] + delta * avg.a_tilde(i, traj.values[i]);
        for (int j = 0; j < pair.r; ++j)
            next += avg.b_tilde(i, traj.values[i], j) * dW(j, i);
        if (!next.allFinite()) {
            traj.aborted = true;
            traj.abort_step = i + 1;
            traj.abort_reason = "NonFinite";
            return traj;
        }
        traj.values[i + 1] = next;
        record_norms(traj, i + 1, space, p, opts);
    }
    return traj;
}

Trajectory run_implicit_spacetime(const DiscreteSpace& space, const TimeGrid& grid,
                                  const OperatorPair& pair, const Vec& u0, const Mat& dW,
                                  const SchemeOptions& opts) {
    return run_implicit(SchemeKind::ImplicitSpaceTime, space, grid, pair, u0, dW, opts);
}

Trajectory run_implicit_time(const DiscreteSpace& fine_space, const TimeGrid& grid,
                             const OperatorPair& pair, const Vec& u0, const Mat& dW,
                             const SchemeOptions& opts) {
    return run_implicit(SchemeKind::ImplicitTime, fine_space, grid, pair, u0, dW, opts);
}

}  // namespace sevo
