#include "sevo/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace sevo {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v) {
    double d = parse_double(key, v);
    int i = static_cast<int>(d);
    if (d != i) throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
    return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        std::uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + v +
                          "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (double d : parse_double_list(key, v)) {
        int i = static_cast<int>(d);
        if (d != i) throw ConfigError("config key '" + key + "': expected integers");
        out.push_back(i);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const std::vector<double>& vs) {
    std::string out;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += fmt(vs[i]);
    }
    return out;
}

std::string fmt(const std::vector<int>& vs) {
    std::string out;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(vs[i]);
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = section + "." + trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));

        if (key == "run.scheme") cfg.scheme = val;
        else if (key == "run.family") cfg.family = val;
        else if (key == "run.n") cfg.n = parse_int(key, val);
        else if (key == "run.m") cfg.m = parse_int(key, val);
        else if (key == "run.T") cfg.T = parse_double(key, val);
        else if (key == "operators.kind") cfg.operators = val;
        else if (key == "operators.p") cfg.p = parse_double(key, val);
        else if (key == "operators.mu") cfg.mu = parse_double(key, val);
        else if (key == "operators.sigma") cfg.sigma = parse_double_list(key, val);
        else if (key == "operators.a") cfg.a = parse_double(key, val);
        else if (key == "operators.b") cfg.b = parse_double_list(key, val);
        else if (key == "operators.c") cfg.c = parse_double_list(key, val);
        else if (key == "operators.d") cfg.d = parse_double_list(key, val);
        else if (key == "operators.epsilon") cfg.epsilon = parse_double(key, val);
        else if (key == "initial.profile") cfg.profile = val;
        else if (key == "mc.paths") cfg.paths = parse_int(key, val);
        else if (key == "mc.seed") cfg.seed = parse_u64(key, val);
        else if (key == "mc.gamma") cfg.gamma = parse_double(key, val);
        else if (key == "mc.workers") cfg.workers = parse_int(key, val);
        else if (key == "mc.deterministic") cfg.deterministic = parse_bool(key, val);
        else if (key == "solver.tolerance") cfg.tolerance = parse_double(key, val);
        else if (key == "solver.max_iterations") cfg.max_iterations = parse_int(key, val);
        else if (key == "solver.time_quad_points") cfg.time_quad_points = parse_int(key, val);
        else if (key == "scan.n_list") cfg.scan_n = parse_int_list(key, val);
        else if (key == "scan.m_list") cfg.scan_m = parse_int_list(key, val);
        else if (key == "ladder.n_list") cfg.ladder_n = parse_int_list(key, val);
        else if (key == "ladder.m_list") cfg.ladder_m = parse_int_list(key, val);
        else if (key == "ladder.reference") cfg.reference = val;
        else if (key == "ladder.ref_n") cfg.ref_n = parse_int(key, val);
        else if (key == "ladder.ref_m") cfg.ref_m = parse_int(key, val);
        else if (key == "ladder.finest_level") cfg.finest_level = parse_int(key, val);
        else if (key == "output.dir") cfg.out_dir = val;
        else if (key == "output.svg") cfg.svg = parse_bool(key, val);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::string out;
    out += "[run]\n";
    out += "scheme = " + c.scheme + "\n";
    out += "family = " + c.family + "\n";
    out += "n = " + std::to_string(c.n) + "\n";
    out += "m = " + std::to_string(c.m) + "\n";
    out += "T = " + fmt(c.T) + "\n";
    out += "[operators]\n";
    out += "kind = " + c.operators + "\n";
    out += "p = " + fmt(c.p) + "\n";
    out += "mu = " + fmt(c.mu) + "\n";
    out += "sigma = " + fmt(c.sigma) + "\n";
    out += "a = " + fmt(c.a) + "\n";
    out += "b = " + fmt(c.b) + "\n";
    out += "c = " + fmt(c.c) + "\n";
    out += "d = " + fmt(c.d) + "\n";
    out += "epsilon = " + fmt(c.epsilon) + "\n";
    out += "[initial]\n";
    out += "profile = " + c.profile + "\n";
    out += "[mc]\n";
    out += "paths = " + std::to_string(c.paths) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "gamma = " + fmt(c.gamma) + "\n";
    out += "workers = " + std::to_string(c.workers) + "\n";
    out += std::string("deterministic = ") + (c.deterministic ? "true" : "false") + "\n";
    out += "[solver]\n";
    out += "tolerance = " + fmt(c.tolerance) + "\n";
    out += "max_iterations = " + std::to_string(c.max_iterations) + "\n";
    out += "time_quad_points = " + std::to_string(c.time_quad_points) + "\n";
    out += "[scan]\n";
    out += "n_list = " + fmt(c.scan_n) + "\n";
    out += "m_list = " + fmt(c.scan_m) + "\n";
    out += "[ladder]\n";
    out += "n_list = " + fmt(c.ladder_n) + "\n";
    out += "m_list = " + fmt(c.ladder_m) + "\n";
    out += "reference = " + c.reference + "\n";
    out += "ref_n = " + std::to_string(c.ref_n) + "\n";
    out += "ref_m = " + std::to_string(c.ref_m) + "\n";
    out += "finest_level = " + std::to_string(c.finest_level) + "\n";
    out += "[output]\n";
    out += "dir = " + c.out_dir + "\n";
    out += std::string("svg = ") + (c.svg ? "true" : "false") + "\n";
    return out;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

}  // namespace sevo
