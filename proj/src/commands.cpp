#include "sevo/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "sevo/analysis.hpp"
#include "sevo/io.hpp"

namespace sevo {

namespace {

std::function<double(double)> profile_fn(const std::string& name) {
    if (name == "sine1")
        return [](double x) { return std::sqrt(2.0) * std::sin(std::acos(-1.0) * x); };
    if (name == "bump")
        return [](double x) { return 16.0 * x * x * (1.0 - x) * (1.0 - x); };
    if (name == "zero") return [](double) { return 0.0; };
    throw ConfigError("config key 'initial.profile': unknown preset '" + name + "'");
}

SpaceFamily family_of(const RunConfig& cfg) {
    if (cfg.family == "spectral") return SpaceFamily::SpectralSine;
    if (cfg.family == "fe") return SpaceFamily::PiecewiseLinearFE;
    throw ConfigError("config key 'run.family': expected spectral|fe, got '" + cfg.family + "'");
}

SchemeKind scheme_of(const RunConfig& cfg) {
    if (cfg.scheme == "explicit") return SchemeKind::ExplicitSpaceTime;
    if (cfg.scheme == "implicit-time") return SchemeKind::ImplicitTime;
    if (cfg.scheme == "implicit-spacetime") return SchemeKind::ImplicitSpaceTime;
    throw ConfigError(
        "config key 'run.scheme': expected explicit|implicit-time|implicit-spacetime, got '" +
        cfg.scheme + "'");
}

OperatorPair pair_of(const RunConfig& cfg) {
    if (cfg.operators == "linear-heat") return make_linear_heat(cfg.mu, cfg.sigma);
    if (cfg.operators == "sign-flipped") return make_sign_flipped(cfg.p, cfg.a, cfg.sigma);
    if (cfg.operators == "example") {
        auto constant = [](double v) { return Field([v](double, double) { return v; }); };
        std::vector<Field> b, c, d;
        for (double v : cfg.b) b.push_back(constant(v));
        for (double v : cfg.c) c.push_back(constant(v));
        for (double v : cfg.d) d.push_back(constant(v));
        return make_example_family(cfg.p, constant(cfg.a), b, c, d, cfg.epsilon, cfg.T);
    }
    throw ConfigError("config key 'operators.kind': expected linear-heat|example|sign-flipped, "
                      "got '" + cfg.operators + "'");
}

SchemeOptions opts_of(const RunConfig& cfg) {
    SchemeOptions o;
    o.solver_tolerance = cfg.tolerance;
    o.solver_max_iterations = cfg.max_iterations;
    o.time_quad_points = cfg.time_quad_points;
    return o;
}

CommandResult guarded(const std::function<CommandResult()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        return {2, "ConfigError", e.what()};
    } catch (const CouplingViolated& e) {
        return {5, "CouplingViolated", e.what()};
    } catch (const RefNotFiner& e) {
        return {5, "RefNotFiner", e.what()};
    } catch (const std::exception& e) {
        return {4, "InternalError", e.what()};
    }
}

}  // namespace

std::string resolve_out_dir(const RunConfig& config) {
    const char* env = std::getenv("OUT_DIR");
    return env && *env ? env : config.out_dir;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    return guarded([&]() -> CommandResult {
        OperatorPair pair = pair_of(cfg);
        DiscreteSpace space = build_space(family_of(cfg), cfg.n);
        TimeGrid grid{cfg.T, cfg.m};
        Vec u0 = project(space, profile_fn(cfg.profile));
        SchemeKind kind = scheme_of(cfg);
        SchemeOptions opts = opts_of(cfg);

        std::vector<Trajectory> trajs(cfg.paths);
        parallel_for(cfg.paths, cfg.workers, [&](int path) {
            Mat dW = cfg.deterministic
                         ? Mat::Zero(pair.r, cfg.m)
                         : direct_increments(pair.r, cfg.T, cfg.m, cfg.seed, path);
            switch (kind) {
                case SchemeKind::ExplicitSpaceTime:
                    trajs[path] = run_explicit(space, grid, pair, u0, dW, opts);
                    break;
                case SchemeKind::ImplicitTime:
                    trajs[path] = run_implicit_time(space, grid, pair, u0, dW, opts);
                    break;
                case SchemeKind::ImplicitSpaceTime:
                    trajs[path] = run_implicit_spacetime(space, grid, pair, u0, dW, opts);
                    break;
            }
        });

        std::map<std::string, std::string> outputs;
        int aborted = 0;
        for (int path = 0; path < cfg.paths; ++path) {
            std::ostringstream csv;
            write_trajectory_csv(csv, trajs[path]);
            char name[48];
            std::snprintf(name, sizeof(name), "trajectory_%04d.csv", path);
            outputs[name] = csv.str();
            if (trajs[path].aborted) ++aborted;
        }
        std::string dir = resolve_out_dir(cfg);
        for (const auto& [name, bytes] : outputs) write_file(dir, name, bytes);
        std::string extra = "{\"aborted_paths\": " + std::to_string(aborted) + "}";
        write_file(dir, "manifest.json", build_manifest("simulate", cfg, outputs, extra));

        if (aborted > 0)
            return {3, "SolverFailure",
                    std::to_string(aborted) + " of " + std::to_string(cfg.paths) +
                        " paths aborted"};
        return {};
    });
}

CommandResult cmd_check_conditions(const RunConfig& cfg) {
    return guarded([&]() -> CommandResult {
        OperatorPair pair = pair_of(cfg);
        DiscreteSpace space = build_space(family_of(cfg), cfg.n);
        ConditionReport report = check_conditions(pair, space, cfg.paths, cfg.seed, cfg.T);

        std::ostringstream csv;
        write_condition_csv(csv, report);
        std::map<std::string, std::string> outputs{{"conditions.csv", csv.str()}};
        int total = report.mono.violations + report.coercivity.violations + report.growth.violations +
                    report.diff_bound.violations;
        std::string extra = "{\"total_violations\": " + std::to_string(total) +
                            ", \"samples\": " + std::to_string(report.n_samples) + "}";
        std::string dir = resolve_out_dir(cfg);
        write_file(dir, "conditions.csv", outputs["conditions.csv"]);
        write_file(dir, "manifest.json", build_manifest("check-conditions", cfg, outputs, extra));
        return {};
    });
}

CommandResult cmd_stability_scan(const RunConfig& cfg) {
    return guarded([&]() -> CommandResult {
        if (cfg.scan_n.empty() || cfg.scan_m.empty())
            throw ConfigError("config keys 'scan.n_list'/'scan.m_list' must be non-empty");
        OperatorPair pair = pair_of(cfg);
        std::vector<ScanCell> cells =
            stability_scan(family_of(cfg), cfg.scan_n, cfg.scan_m, pair, profile_fn(cfg.profile),
                           cfg.paths, cfg.gamma, cfg.T, cfg.seed, cfg.deterministic, cfg.workers);

        std::ostringstream csv;
        write_scan_csv(csv, cells);
        std::map<std::string, std::string> outputs{{"scan.csv", csv.str()}};
        if (cfg.svg) outputs["scan.svg"] = svg_heatmap(cells);
        std::string dir = resolve_out_dir(cfg);
        for (const auto& [name, bytes] : outputs) write_file(dir, name, bytes);
        write_file(dir, "manifest.json", build_manifest("stability-scan", cfg, outputs));
        return {};
    });
}

CommandResult cmd_converge(const RunConfig& cfg) {
    return guarded([&]() -> CommandResult {
        if (cfg.ladder_n.size() != cfg.ladder_m.size() || cfg.ladder_n.empty())
            throw ConfigError(
                "config keys 'ladder.n_list'/'ladder.m_list' must be non-empty and equal length");
        OperatorPair pair = pair_of(cfg);
        LadderConfig lc;
        lc.kind = scheme_of(cfg);
        lc.family = family_of(cfg);
        for (size_t i = 0; i < cfg.ladder_n.size(); ++i)
            lc.levels.push_back({cfg.ladder_n[i], cfg.ladder_m[i]});
        if (cfg.reference == "oracle") lc.use_oracle = true;
        else if (cfg.reference == "self") lc.use_oracle = false;
        else throw ConfigError("config key 'ladder.reference': expected oracle|self, got '" +
                               cfg.reference + "'");
        lc.ref_n = cfg.ref_n;
        lc.ref_m = cfg.ref_m;
        lc.oracle_sigma = cfg.sigma;
        lc.mu_scale = cfg.mu;
        lc.finest_level = cfg.finest_level;
        lc.n_paths = cfg.paths;
        lc.seed = cfg.seed;
        lc.T = cfg.T;
        lc.gamma = cfg.gamma;
        lc.workers = cfg.workers;
        lc.u0_profile = profile_fn(cfg.profile);
        lc.opts = opts_of(cfg);

        LadderReport report = convergence_ladder(pair, lc);

        std::ostringstream csv;
        write_ladder_csv(csv, report);
        std::map<std::string, std::string> outputs{{"ladder.csv", csv.str()}};
        if (cfg.svg) outputs["ladder.svg"] = svg_loglog(report);
        int aborted = 0;
        for (const ErrorReport& lvl : report.levels) aborted += lvl.aborted;
        std::string extra = "{\"fitted_order\": " +
                            (report.slope_defined ? format_double(report.fitted_order)
                                                  : std::string("null")) +
                            ", \"aborted_paths\": " + std::to_string(aborted) + "}";
        std::string dir = resolve_out_dir(cfg);
        for (const auto& [name, bytes] : outputs) write_file(dir, name, bytes);
        write_file(dir, "manifest.json", build_manifest("converge", cfg, outputs, extra));

        if (aborted > 0)
            return {3, "SolverFailure", std::to_string(aborted) + " ladder paths aborted"};
        return {};
    });
}

}  // namespace sevo
