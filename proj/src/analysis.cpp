#include "sevo/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

namespace sevo {

namespace {
const double kPi = std::acos(-1.0);
}

MCStat aggregate(const std::vector<double>& samples) {
    MCStat st;
    st.count = static_cast<int>(samples.size());
    if (st.count == 0) return st;
    double sum = 0.0;
    for (double s : samples) sum += s;
    st.mean = sum / st.count;
    if (st.count > 1) {
        double var = 0.0;
        for (double s : samples) var += (s - st.mean) * (s - st.mean);
        var /= (st.count - 1);
        st.se = std::sqrt(var / st.count);
    }
    return st;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int count = std::min(workers, n);
    pool.reserve(count);
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

Vec OUOracle::terminal(const Mat& dW_finest, double T) const {
    const int modes = static_cast<int>(mu.size());
    const int mf = static_cast<int>(dW_finest.cols());
    const double d = T / mf;
    Vec u(modes);
    for (int k = 0; k < modes; ++k) u[k] = u0[k];
    Vec decay(modes), scale(modes);
    for (int k = 0; k < modes; ++k) {
        decay[k] = std::exp(-mu[k] * d);
        double var = mu[k] > 1e-14 ? (1.0 - std::exp(-2.0 * mu[k] * d)) / (2.0 * mu[k]) : d;
        scale[k] = sigma[k] * std::sqrt(var / d);
    }
    for (int i = 0; i < mf; ++i)
        for (int k = 0; k < modes; ++k) u[k] = decay[k] * u[k] + scale[k] * dW_finest(k, i);
    return u;
}

std::vector<Vec> OUOracle::at_nodes(const Mat& dW_finest, double T, int m) const {
    const int modes = static_cast<int>(mu.size());
    const int mf = static_cast<int>(dW_finest.cols());
    if (mf % m != 0) throw std::invalid_argument("OUOracle::at_nodes: m must divide finest mesh");
    const int stride = mf / m;
    const double d = T / mf;
    std::vector<Vec> out;
    out.reserve(m + 1);
    Vec u(modes), decay(modes), scale(modes);
    for (int k = 0; k < modes; ++k) {
        u[k] = u0[k];
        decay[k] = std::exp(-mu[k] * d);
        double var = mu[k] > 1e-14 ? (1.0 - std::exp(-2.0 * mu[k] * d)) / (2.0 * mu[k]) : d;
        scale[k] = sigma[k] * std::sqrt(var / d);
    }
    out.push_back(u);
    for (int i = 0; i < mf; ++i) {
        for (int k = 0; k < modes; ++k) u[k] = decay[k] * u[k] + scale[k] * dW_finest(k, i);
        if ((i + 1) % stride == 0) out.push_back(u);
    }
    return out;
}

double h_dist_sq(const DiscreteSpace& a_space, const Vec& a, const DiscreteSpace& b_space,
                 const Vec& b) {
    if (a_space.family == SpaceFamily::SpectralSine &&
        b_space.family == SpaceFamily::SpectralSine) {
        int top = std::max(a_space.dim, b_space.dim);
        double acc = 0.0;
        for (int k = 0; k < top; ++k) {
            double d = (k < a_space.dim ? a[k] : 0.0) - (k < b_space.dim ? b[k] : 0.0);
            acc += d * d;
        }
        return acc;
    }
    QuadratureRule rule = composite_gauss(4, std::max({64, 2 * a_space.n, 2 * b_space.n}));
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        double d = a_space.eval(a, rule.nodes[q]) - b_space.eval(b, rule.nodes[q]);
        acc += rule.weights[q] * d * d;
    }
    return acc;
}

double v_dist_pow(const DiscreteSpace& a_space, const Vec& a, const DiscreteSpace& b_space,
                  const Vec& b, double p) {
    if (a_space.family == SpaceFamily::SpectralSine &&
        b_space.family == SpaceFamily::SpectralSine) {
        const DiscreteSpace& big = a_space.dim >= b_space.dim ? a_space : b_space;
        Vec diff = Vec::Zero(big.dim);
        for (int k = 0; k < a_space.dim; ++k) diff[k] += a[k];
        for (int k = 0; k < b_space.dim; ++k) diff[k] -= b[k];
        return v_norm_pow(big, diff, p);
    }
    QuadratureRule rule = composite_gauss(4, std::max({64, 2 * a_space.n, 2 * b_space.n}));
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        double d = a_space.eval(a, rule.nodes[q]) - b_space.eval(b, rule.nodes[q]);
        double dd = a_space.eval_deriv(a, rule.nodes[q]) - b_space.eval_deriv(b, rule.nodes[q]);
        acc += rule.weights[q] * (std::pow(std::abs(d), p) + std::pow(std::abs(dd), p));
    }
    return acc;
}

namespace {

Trajectory run_scheme(SchemeKind kind, const DiscreteSpace& space, const TimeGrid& grid,
                      const OperatorPair& pair, const Vec& u0, const Mat& dW,
                      const SchemeOptions& opts) {
    switch (kind) {
        case SchemeKind::ExplicitSpaceTime:
            return run_explicit(space, grid, pair, u0, dW, opts);
        case SchemeKind::ImplicitTime:
            return run_implicit_time(space, grid, pair, u0, dW, opts);
        case SchemeKind::ImplicitSpaceTime:
            return run_implicit_spacetime(space, grid, pair, u0, dW, opts);
    }
    throw std::logic_error("run_scheme: unknown kind");
}

struct PathOut {
    bool ok = false;
    double err_h_sq = 0.0;
    double wv_err = 0.0;
    std::vector<double> h_sq_nodes;
    double v_int = 0.0;
};

// Per-step integrals of lambda, for the weighted V functionals.
std::vector<double> lambda_step_integrals(const StructuralConstants& c, const TimeGrid& grid) {
    std::vector<double> out(grid.m);
    for (int i = 0; i < grid.m; ++i) {
        QuadratureRule rule = gauss_legendre(8, grid.node(i), grid.node(i + 1));
        double acc = 0.0;
        for (int q = 0; q < rule.size(); ++q) acc += rule.weights[q] * c.lambda_fn(rule.nodes[q]);
        out[i] = acc;
    }
    return out;
}

}  // namespace

double gronwall_bound(const StructuralConstants& constants, double u0_h_sq, double gamma,
                      double T) {
    QuadratureRule rule = gauss_legendre(48, 0.0, T);
    double k1 = 0.0, rest = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
        k1 += rule.weights[q] * constants.k1_fn(rule.nodes[q]);
        rest += rule.weights[q] * (constants.k1bar_fn(rule.nodes[q]) +
                                   gamma * constants.k2_fn(rule.nodes[q]) / constants.alpha);
    }
    return std::exp(k1) * (u0_h_sq + rest);
}

ErrorReport strong_error_at_T(const OperatorPair& pair, double T, const SchemeSpec& scheme,
                              const Reference& ref, int finest_level,
                              const std::function<double(double)>& u0_profile, int n_paths,
                              std::uint64_t seed, double gamma, int workers, bool deterministic,
                              const SchemeOptions& opts) {
    const OUOracle* oracle = nullptr;
    SchemeSpec ref_scheme;
    bool ref_is_scheme = false;
    if (std::holds_alternative<const OUOracle*>(ref)) {
        oracle = std::get<const OUOracle*>(ref);
    } else {
        ref_scheme = std::get<SchemeSpec>(ref);
        ref_is_scheme = true;
        bool same = ref_scheme.space == scheme.space && ref_scheme.m == scheme.m &&
                    ref_scheme.kind == scheme.kind;
        bool finer = ref_scheme.space->dim >= scheme.space->dim && ref_scheme.m >= scheme.m &&
                     (ref_scheme.space->dim > scheme.space->dim || ref_scheme.m > scheme.m);
        if (!same && !finer) throw RefNotFiner("strong_error_at_T: reference is not finer");
        if (ref_scheme.m % scheme.m != 0)
            throw RefNotFiner("strong_error_at_T: reference mesh must refine the scheme mesh");
    }

    TimeGrid grid{T, scheme.m};
    TimeGrid ref_grid{T, ref_is_scheme ? ref_scheme.m : scheme.m};
    Vec u0 = project(*scheme.space, u0_profile);
    Vec ref_u0 = ref_is_scheme ? project(*ref_scheme.space, u0_profile) : Vec();
    const double p = pair.constants.p;
    std::vector<double> lam_int = lambda_step_integrals(pair.constants, grid);

    std::vector<PathOut> outs(n_paths);
    parallel_for(n_paths, workers, [&](int path) {
        PathOut& out = outs[path];
        Mat dW, dW_ref, dW_finest;
        if (deterministic) {
            dW = Mat::Zero(pair.r, scheme.m);
            dW_ref = Mat::Zero(pair.r, ref_is_scheme ? ref_scheme.m : 1);
            dW_finest = Mat::Zero(pair.r, 1 << finest_level);
        } else {
            WienerTree tree = sample_path(pair.r, T, finest_level, seed, path);
            dW = increments(tree, scheme.m);
            if (ref_is_scheme) dW_ref = increments(tree, ref_scheme.m);
            if (oracle) dW_finest = increments(tree, 1 << finest_level);
        }

        Trajectory traj = run_scheme(scheme.kind, *scheme.space, grid, pair, u0, dW, opts);
        if (traj.aborted) return;

        Vec ref_T;
        std::vector<Vec> ref_nodes;
        const DiscreteSpace* ref_space = nullptr;
        if (oracle) {
            ref_space = oracle->space;
            ref_nodes = oracle->at_nodes(dW_finest, T, scheme.m);
            ref_T = ref_nodes.back();
        } else {
            Trajectory rtraj =
                run_scheme(ref_scheme.kind, *ref_scheme.space, ref_grid, pair, ref_u0, dW_ref, opts);
            if (rtraj.aborted) return;
            ref_space = ref_scheme.space;
            const int stride = ref_scheme.m / scheme.m;
            ref_nodes.reserve(scheme.m + 1);
            for (int i = 0; i <= scheme.m; ++i) ref_nodes.push_back(rtraj.values[i * stride]);
            ref_T = ref_nodes.back();
        }

        out.err_h_sq = h_dist_sq(*scheme.space, traj.values[scheme.m], *ref_space, ref_T);
        out.wv_err = 0.0;
        for (int i = 0; i < scheme.m; ++i)
            out.wv_err += lam_int[i] * v_dist_pow(*scheme.space, traj.values[i + 1], *ref_space,
                                                  ref_nodes[i + 1], p);
        out.h_sq_nodes.resize(scheme.m + 1);
        out.v_int = 0.0;
        for (int i = 0; i <= scheme.m; ++i) {
            double hn = traj.diagnostics[i].h_norm;
            out.h_sq_nodes[i] = hn * hn;
            if (i > 0) out.v_int += lam_int[i - 1] * std::pow(traj.diagnostics[i].v_norm, p);
        }
        out.ok = true;
    });

    ErrorReport rep;
    rep.n = scheme.space->n;
    rep.m = scheme.m;
    rep.delta = grid.delta();
    rep.rho = c_b_ratio(*scheme.space, scheme.m, pair.constants.alpha, T);
    rep.gamma_class = rep.rho <= gamma;
    rep.paths = n_paths;

    std::vector<double> errs, wvs, vints;
    std::vector<std::vector<double>> hsq_by_node(scheme.m + 1);
    for (const PathOut& out : outs) {
        if (!out.ok) {
            ++rep.aborted;
            continue;
        }
        errs.push_back(out.err_h_sq);
        wvs.push_back(out.wv_err);
        vints.push_back(out.v_int);
        for (int i = 0; i <= scheme.m; ++i) hsq_by_node[i].push_back(out.h_sq_nodes[i]);
    }
    rep.strong_h_error_sq = aggregate(errs);
    rep.weighted_v_error = aggregate(wvs);
    rep.energy_int_v = aggregate(vints);
    for (int i = 0; i <= scheme.m; ++i) {
        MCStat st = aggregate(hsq_by_node[i]);
        if (st.mean > rep.energy_sup_h) {
            rep.energy_sup_h = st.mean;
            rep.energy_sup_h_se = st.se;
        }
    }
    return rep;
}

EnergyLedger energy_ledger(const std::vector<Trajectory>& trajectories, const OperatorPair& pair,
                           double u0_h_sq, double gamma) {
    if (trajectories.empty()) throw std::invalid_argument("energy_ledger: no trajectories");
    const TimeGrid& grid = trajectories.front().grid;
    const double p = pair.constants.p;
    std::vector<double> lam_int = lambda_step_integrals(pair.constants, grid);

    EnergyLedger led;
    led.bound = gronwall_bound(pair.constants, u0_h_sq, gamma, grid.T);
    std::vector<double> vints;
    std::vector<std::vector<double>> hsq_by_node(grid.m + 1);
    for (const Trajectory& traj : trajectories) {
        if (traj.aborted) continue;
        double vint = 0.0;
        for (int i = 0; i <= grid.m; ++i) {
            double hn = traj.diagnostics[i].h_norm;
            hsq_by_node[i].push_back(hn * hn);
            if (i > 0) vint += lam_int[i - 1] * std::pow(traj.diagnostics[i].v_norm, p);
        }
        vints.push_back(vint);
    }
    led.energy_int_v = aggregate(vints);
    for (int i = 0; i <= grid.m; ++i) {
        MCStat st = aggregate(hsq_by_node[i]);
        if (st.mean > led.energy_sup_h) {
            led.energy_sup_h = st.mean;
            led.energy_sup_h_se = st.se;
        }
    }
    led.within_bound = led.energy_sup_h <= led.bound + 3.0 * led.energy_sup_h_se;
    return led;
}

std::vector<ScanCell> stability_scan(SpaceFamily family, const std::vector<int>& n_list,
                                     const std::vector<int>& m_list, const OperatorPair& pair,
                                     const std::function<double(double)>& u0_profile, int n_paths,
                                     double gamma, double T, std::uint64_t seed,
                                     bool deterministic, int workers) {
    std::vector<ScanCell> cells;
    for (int n : n_list) {
        DiscreteSpace space = build_space(family, n);
        Vec u0 = project(space, u0_profile);
        for (int m : m_list) {
            TimeGrid grid{T, m};
            ScanCell cell;
            cell.n = n;
            cell.m = m;
            cell.rho = c_b_ratio(space, m, pair.constants.alpha, T);
            cell.bound = gronwall_bound(pair.constants, u0.squaredNorm(), gamma, T);

            int paths = deterministic ? 1 : n_paths;
            std::vector<Trajectory> trajs(paths);
            parallel_for(paths, workers, [&](int path) {
                Mat dW = deterministic ? Mat::Zero(pair.r, m)
                                       : direct_increments(pair.r, T, m, seed, path);
                trajs[path] = run_explicit(space, grid, pair, u0, dW);
            });
            for (const Trajectory& traj : trajs)
                if (traj.aborted) ++cell.aborted;
            if (cell.aborted == paths) {
                cell.stable = false;
                cell.energy_sup_h = std::numeric_limits<double>::infinity();
            } else {
                EnergyLedger led = energy_ledger(trajs, pair, u0.squaredNorm(), gamma);
                cell.energy_sup_h = led.energy_sup_h;
                cell.stable = cell.aborted == 0 && led.within_bound;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

double monotonicity_gap(const OperatorPair& pair, const DiscreteSpace& space, const TimeGrid& grid,
                        const std::vector<Vec>& u_values, const std::vector<Vec>& y_values) {
    if (static_cast<int>(u_values.size()) != grid.m + 1 ||
        static_cast<int>(y_values.size()) < grid.m)
        throw std::invalid_argument("monotonicity_gap: value trajectories must cover the grid");
    double acc = 0.0;
    const double delta = grid.delta();
    for (int i = 0; i < grid.m; ++i) {
        const Vec& u = u_values[i + 1];  // u(kappa2(t)) on ]t_i, t_{i+1}]
        const Vec& y = y_values[i];      // y stepwise constant from t_i
        double t = grid.node(i + 1);
        Vec w = u - y;
        double term = 2.0 * (drift_pairing(pair, space, t, u, w) -
                             drift_pairing(pair, space, t, y, w));
        for (int j = 0; j < pair.r; ++j)
            term += (assemble_diffusion(pair, space, t, u, j) -
                     assemble_diffusion(pair, space, t, y, j))
                        .squaredNorm();
        acc += delta * term;
    }
    return acc;
}

LadderReport convergence_ladder(const OperatorPair& pair, const LadderConfig& config) {
    if (config.levels.empty()) throw std::invalid_argument("convergence_ladder: empty ladder");

    std::deque<DiscreteSpace> spaces;
    for (const LadderLevel& lvl : config.levels)
        spaces.push_back(build_space(config.family, lvl.n));

    if (config.kind == SchemeKind::ExplicitSpaceTime) {
        double prev = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < config.levels.size(); ++i) {
            double rho = c_b_ratio(spaces[i], config.levels[i].m, pair.constants.alpha, config.T);
            if (rho >= prev)
                throw CouplingViolated("convergence_ladder: explicit ladder rho not decreasing");
            prev = rho;
        }
    }

    OUOracle oracle;
    DiscreteSpace oracle_space;
    DiscreteSpace ref_space;
    SchemeSpec ref_scheme;
    Reference ref = &oracle;
    if (config.use_oracle) {
        int top_n = 0;
        for (const LadderLevel& lvl : config.levels) top_n = std::max(top_n, lvl.n);
        oracle_space = build_space(SpaceFamily::SpectralSine, top_n);
        oracle.space = &oracle_space;
        Vec u0 = project(oracle_space, config.u0_profile);
        for (int k = 0; k < top_n; ++k) {
            oracle.mu.push_back(config.mu_scale * kPi * kPi * (k + 1) * (k + 1));
            oracle.sigma.push_back(k < static_cast<int>(config.oracle_sigma.size())
                                       ? config.oracle_sigma[k]
                                       : 0.0);
            oracle.u0.push_back(u0[k]);
        }
    } else {
        if (config.ref_n <= 0 || config.ref_m <= 0)
            throw std::invalid_argument("convergence_ladder: self-refinement reference required");
        ref_space = build_space(config.family, config.ref_n);
        ref_scheme = SchemeSpec{SchemeKind::ImplicitSpaceTime, &ref_space, config.ref_m};
        ref = ref_scheme;
    }

    LadderReport rep;
    for (size_t i = 0; i < config.levels.size(); ++i) {
        SchemeSpec spec{config.kind, &spaces[i], config.levels[i].m};
        rep.levels.push_back(strong_error_at_T(pair, config.T, spec, ref, config.finest_level,
                                               config.u0_profile, config.n_paths, config.seed,
                                               config.gamma, config.workers, false, config.opts));
    }

    // Least-squares fit of log err^2 against log delta.
    std::vector<double> xs, ys;
    for (const ErrorReport& lvl : rep.levels)
        if (lvl.strong_h_error_sq.mean > 0.0) {
            xs.push_back(std::log(lvl.delta));
            ys.push_back(std::log(lvl.strong_h_error_sq.mean));
        }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= xs.size();
        my /= ys.size();
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < xs.size(); ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            den += (xs[i] - mx) * (xs[i] - mx);
        }
        if (den > 0.0) {
            rep.slope_defined = true;
            rep.slope_log_err_sq = num / den;
            rep.fitted_order = rep.slope_log_err_sq / 2.0;
        }
    }
    return rep;
}

}  // namespace sevo
