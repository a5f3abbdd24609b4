// Command-line harness: simulate | check-conditions | stability-scan |
// converge over key-value configs. Exit code 0 iff the requested
// computation completed cleanly; otherwise stderr carries one line
// "error: <class>: <message>".
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sevo/commands.hpp"
#include "sevo/config.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int paths = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = -1;
    bool svg = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Config file path")->required();
    cmd->add_option("--out", f.out_dir, "Output directory (overrides config)");
    cmd->add_option("--paths", f.paths, "Path/sample count override");
    cmd->add_option("--seed", f.seed, "Master seed override")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--workers", f.workers, "Worker thread count");
    cmd->add_flag("--svg", f.svg, "Also emit SVG plots");
}

int run(const CommonFlags& f, sevo::CommandResult (*cmd)(const sevo::RunConfig&)) {
    sevo::RunConfig cfg;
    try {
        cfg = sevo::load_config(f.config_path);
    } catch (const sevo::ConfigError& e) {
        std::cerr << "error: ConfigError: " << e.what() << "\n";
        return 2;
    }
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.paths >= 0) cfg.paths = f.paths;
    if (f.seed_set) cfg.seed = f.seed;
    if (f.workers >= 1) cfg.workers = f.workers;
    if (f.svg) cfg.svg = true;

    sevo::CommandResult res = cmd(cfg);
    if (res.exit_code != 0)
        std::cerr << "error: " << res.error_class << ": " << res.message << "\n";
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic evolution scheme harness"};
    app.require_subcommand(1);

    CommonFlags f_sim, f_cond, f_scan, f_conv;
    CLI::App* sim = app.add_subcommand("simulate", "Run one scheme, dump trajectories");
    CLI::App* cond = app.add_subcommand("check-conditions", "Sampled structural-condition margins");
    CLI::App* scan = app.add_subcommand("stability-scan", "Explicit-scheme (n, m) stability grid");
    CLI::App* conv = app.add_subcommand("converge", "Coupled convergence ladder");
    add_common(sim, f_sim);
    add_common(cond, f_cond);
    add_common(scan, f_scan);
    add_common(conv, f_conv);

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return run(f_sim, sevo::cmd_simulate);
    if (cond->parsed()) return run(f_cond, sevo::cmd_check_conditions);
    if (scan->parsed()) return run(f_scan, sevo::cmd_stability_scan);
    return run(f_conv, sevo::cmd_converge);
}
