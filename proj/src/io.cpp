#include "sevo/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sevo {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const int dim = traj.values.empty() ? 0 : static_cast<int>(traj.values.front().size());
    out << "step,time";
    for (int k = 0; k < dim; ++k) out << ",c" << k;
    out << ",h_norm,v_norm,solver_iterations,residual\n";
    for (size_t i = 0; i < traj.values.size(); ++i) {
        out << i << "," << format_double(traj.grid.node(static_cast<int>(i)));
        for (int k = 0; k < dim; ++k) out << "," << format_double(traj.values[i][k]);
        const StepDiagnostics& d = traj.diagnostics[i];
        out << "," << format_double(d.h_norm) << "," << format_double(d.v_norm) << ","
            << d.solver_iterations << "," << format_double(d.residual) << "\n";
    }
}

namespace {
void condition_row(std::ostream& out, const char* name, const ConditionStats& st) {
    out << name << "," << format_double(st.min_margin) << "," << st.violations << ","
        << st.worst_index << "\n";
}
}  // namespace

void write_condition_csv(std::ostream& out, const ConditionReport& report) {
    out << "check,min_margin,violations,worst_sample\n";
    condition_row(out, "monotonicity", report.mono);
    if (report.has_relaxed) condition_row(out, "relaxed_monotonicity", report.relaxed_mono);
    condition_row(out, "coercivity", report.coercivity);
    condition_row(out, "growth", report.growth);
    condition_row(out, "diffusion_bound", report.diff_bound);
}

void write_scan_csv(std::ostream& out, const std::vector<ScanCell>& cells) {
    out << "n,m,rho,stable,energy_sup_h,bound,aborted\n";
    for (const ScanCell& c : cells)
        out << c.n << "," << c.m << "," << format_double(c.rho) << "," << (c.stable ? 1 : 0)
            << "," << format_double(c.energy_sup_h) << "," << format_double(c.bound) << ","
            << c.aborted << "\n";
}

void write_ladder_csv(std::ostream& out, const LadderReport& report) {
    out << "n,m,delta,rho,err_h_sq,err_h_sq_se,weighted_v_err,weighted_v_err_se,"
           "energy_sup_h,paths,aborted\n";
    for (const ErrorReport& lvl : report.levels)
        out << lvl.n << "," << lvl.m << "," << format_double(lvl.delta) << ","
            << format_double(lvl.rho) << "," << format_double(lvl.strong_h_error_sq.mean) << ","
            << format_double(lvl.strong_h_error_sq.se) << ","
            << format_double(lvl.weighted_v_error.mean) << ","
            << format_double(lvl.weighted_v_error.se) << "," << format_double(lvl.energy_sup_h)
            << "," << lvl.paths << "," << lvl.aborted << "\n";
}

namespace {

struct Frame {
    double x0, x1, y0, y1;           // data range
    double px0 = 60, px1 = 440, py0 = 300, py1 = 30;  // pixel range (y flipped)
    double sx(double x) const { return px0 + (x - x0) / (x1 - x0 + 1e-300) * (px1 - px0); }
    double sy(double y) const { return py0 + (y - y0) / (y1 - y0 + 1e-300) * (py1 - py0); }
};

std::string svg_open() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"340\" "
           "viewBox=\"0 0 480 340\">\n<rect width=\"480\" height=\"340\" fill=\"white\"/>\n";
}

}  // namespace

std::string svg_loglog(const LadderReport& report) {
    std::ostringstream s;
    s << svg_open();
    std::vector<std::pair<double, double>> pts;
    for (const ErrorReport& lvl : report.levels)
        if (lvl.strong_h_error_sq.mean > 0.0)
            pts.push_back({std::log10(lvl.delta), std::log10(lvl.strong_h_error_sq.mean)});
    if (!pts.empty()) {
        Frame f{pts.front().first, pts.front().first, pts.front().second, pts.front().second};
        for (auto& p : pts) {
            f.x0 = std::min(f.x0, p.first);
            f.x1 = std::max(f.x1, p.first);
            f.y0 = std::min(f.y0, p.second);
            f.y1 = std::max(f.y1, p.second);
        }
        s << "<line x1=\"60\" y1=\"300\" x2=\"440\" y2=\"300\" stroke=\"black\"/>\n"
          << "<line x1=\"60\" y1=\"300\" x2=\"60\" y2=\"30\" stroke=\"black\"/>\n";
        s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
        for (auto& p : pts) s << format_double(f.sx(p.first)) << "," << format_double(f.sy(p.second)) << " ";
        s << "\"/>\n";
        for (auto& p : pts)
            s << "<circle cx=\"" << format_double(f.sx(p.first)) << "\" cy=\""
              << format_double(f.sy(p.second)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
        s << "<text x=\"230\" y=\"330\" font-size=\"12\">log10 step size</text>\n"
          << "<text x=\"10\" y=\"20\" font-size=\"12\">log10 squared error";
        if (report.slope_defined)
            s << " (fitted order " << format_double(report.fitted_order) << ")";
        s << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

std::string svg_heatmap(const std::vector<ScanCell>& cells) {
    std::vector<int> ns, ms;
    for (const ScanCell& c : cells) {
        if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
        if (std::find(ms.begin(), ms.end(), c.m) == ms.end()) ms.push_back(c.m);
    }
    std::sort(ns.begin(), ns.end());
    std::sort(ms.begin(), ms.end());
    const double cw = 380.0 / std::max<size_t>(1, ms.size());
    const double ch = 270.0 / std::max<size_t>(1, ns.size());
    std::ostringstream s;
    s << svg_open();
    for (const ScanCell& c : cells) {
        size_t i = std::find(ns.begin(), ns.end(), c.n) - ns.begin();
        size_t j = std::find(ms.begin(), ms.end(), c.m) - ms.begin();
        double x = 60 + j * cw, y = 30 + i * ch;
        s << "<rect x=\"" << format_double(x) << "\" y=\"" << format_double(y) << "\" width=\""
          << format_double(cw) << "\" height=\"" << format_double(ch) << "\" fill=\""
          << (c.stable ? "#4caf50" : "#e53935") << "\" stroke=\"white\"/>\n";
    }
    for (size_t i = 0; i < ns.size(); ++i)
        s << "<text x=\"15\" y=\"" << format_double(30 + (i + 0.6) * ch)
          << "\" font-size=\"11\">n=" << ns[i] << "</text>\n";
    for (size_t j = 0; j < ms.size(); ++j)
        s << "<text x=\"" << format_double(60 + (j + 0.2) * cw)
          << "\" y=\"320\" font-size=\"11\">m=" << ms[j] << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string build_manifest(const std::string& command, const RunConfig& config,
                           const std::map<std::string, std::string>& outputs,
                           const std::string& extra_json) {
    json j;
    j["version"] = "1.0.0";
    j["command"] = command;
    j["config"] = serialize_config(config);
    j["seed"] = config.seed;
    j["workers"] = config.workers;
    j["quadrature"] = {{"space_rule", "composite Gauss-Legendre, >= 4 points per basis scale"},
                       {"time_quad_points", config.time_quad_points}};
    j["solver"] = {{"tolerance", config.tolerance}, {"max_iterations", config.max_iterations}};

    json files = json::object();
    std::string combined;
    for (const auto& [name, bytes] : outputs) {  // std::map: sorted names
        std::string h = hash_hex(fnv1a64(bytes));
        files[name] = h;
        combined += name;
        combined += '\0';
        combined += h;
    }
    j["outputs"] = files;
    j["content_hash"] = hash_hex(fnv1a64(combined));
    if (!extra_json.empty()) j["results"] = json::parse(extra_json);

    std::time_t now = std::time(nullptr);
    char ts[32];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["created"] = ts;  // informational only; never hashed
    return j.dump(2) + "\n";
}

void write_file(const std::string& dir, const std::string& name, const std::string& bytes) {
    std::filesystem::create_directories(dir);
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + name + "' in '" + dir + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace sevo
