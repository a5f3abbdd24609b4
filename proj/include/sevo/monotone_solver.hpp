#pragma once

#include <functional>
#include <vector>

#include "sevo/operators.hpp"
#include "sevo/spaces.hpp"
#include "sevo/timegrid.hpp"

namespace sevo {

/// Finite-dimensional monotone equation D(x) = y in the H-orthonormal
/// coefficient basis. For the schemes' per-step operator
/// D = I - delta Pi_n A(.) the strong monotonicity constant is 1.
struct MonotoneProblem {
    std::function<Vec(const Vec&)> apply_d;
    std::function<Mat(const Vec&)> jacobian;  // optional analytic Jacobian
    Vec y;
    double strong_mono_const = 1.0;
    double coer_c1 = 0.0;  // <D(x), x> >= c1 |x|_V^p - c2
    double coer_c2 = 0.0;
    double tolerance = 1e-10;  // residual target in H-norm
    int max_iterations = 200;
};

enum class SolveStatus { Converged, MaxIterations, NonMonotoneDetected };

struct SolveResult {
    Vec x;
    int iterations = 0;
    double final_residual = 0.0;
    SolveStatus status = SolveStatus::Converged;
    std::vector<double> residual_history;
};

/// Damped Newton with backtracking on the merit |D(x) - y|_H^2 / 2;
/// finite-difference Jacobian when none is supplied; falls back to
/// strongly-monotone relaxation when a Newton step makes no progress.
SolveResult solve(const MonotoneProblem& problem, const Vec& start);

struct NormBoundCheck {
    bool ok = false;
    double margin = 0.0;
    double value = 0.0;
    double bound = 0.0;
};

/// Checks |x|_V^p <= (C1 + 2 C2)/C1 + |y|_{V*,n}^2 / C1^2.
NormBoundCheck verify_norm_bound(const DiscreteSpace& space, double p, double c1, double c2,
                                 const Vec& x, const Vec& y);

struct WellposednessWindow {
    std::vector<bool> step_ok;  // per step i: int_{t_i}^{t_{i+1}} K1 < 2
    bool all_ok = true;
};

WellposednessWindow wellposedness_window(const StructuralConstants& constants,
                                         const TimeGrid& grid, int quad_points = 16);

/// Forward finite-difference Jacobian, step 1e-6 (1 + |x|).
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x);

}  // namespace sevo
