#pragma once

#include <string>
#include <vector>

#include "sevo/monotone_solver.hpp"
#include "sevo/noise.hpp"
#include "sevo/operators.hpp"
#include "sevo/spaces.hpp"
#include "sevo/timegrid.hpp"

namespace sevo {

enum class SchemeKind { ExplicitSpaceTime, ImplicitTime, ImplicitSpaceTime };

struct StepDiagnostics {
    int solver_iterations = 0;
    double residual = 0.0;
    double h_norm = 0.0;
    double v_norm = 0.0;
};

/// One scheme run: coefficient values at the grid nodes plus per-step
/// diagnostics. For implicit schemes values[0] = 0 and u_0 enters at
/// t_1; for the explicit scheme values[0] = values[1] = Pi_n u_0.
/// Between nodes the process reads stepwise constant.
struct Trajectory {
    SchemeKind scheme = SchemeKind::ExplicitSpaceTime;
    TimeGrid grid;
    const DiscreteSpace* space = nullptr;
    std::vector<Vec> values;
    std::vector<StepDiagnostics> diagnostics;
    bool aborted = false;
    int abort_step = -1;
    std::string abort_reason;
    bool wellposed_ok = true;  // implicit schemes: per-step int K1 < 2
};

struct SchemeOptions {
    double solver_tolerance = 1e-10;
    int solver_max_iterations = 200;
    int time_quad_points = 4;
    bool record_diagnostics = true;
};

/// Explicit space-time scheme: both the drift and the noise term use
/// backward averages over [t_{i-1}, t_i]; the i = 0 step adds nothing
/// beyond the projected initial value. dW is r x m (column i holds
/// W_{t_{i+1}} - W_{t_i}). Overflow aborts the trajectory with the
/// first bad step recorded.
Trajectory run_explicit(const DiscreteSpace& space, const TimeGrid& grid, const OperatorPair& pair,
                        const Vec& u0, const Mat& dW, const SchemeOptions& opts = {});

/// Implicit space-time scheme: each step solves D_n(x) = y with
/// D_n = I_n - delta Pi_n A^m_{t_i}(.) (forward drift average) and
/// y = previous value plus the backward-averaged noise term; the first
/// step injects Pi_n u_0.
Trajectory run_implicit_spacetime(const DiscreteSpace& space, const TimeGrid& grid,
                                  const OperatorPair& pair, const Vec& u0, const Mat& dW,
                                  const SchemeOptions& opts = {});

/// Time-implicit scheme realized on a fine reference space (a stand-in
/// for the non-discretized V-valued iteration, run at a resolution far
/// above any compared space-time scheme). Identical stepping, kind tag
/// ImplicitTime.
Trajectory run_implicit_time(const DiscreteSpace& fine_space, const TimeGrid& grid,
                             const OperatorPair& pair, const Vec& u0, const Mat& dW,
                             const SchemeOptions& opts = {});

/// kappa step maps exposed as an operation (which = 1 or 2).
double kappa(const TimeGrid& grid, double t, int which);

}  // namespace sevo
