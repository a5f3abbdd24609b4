#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sevo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key-value run configuration with [section] headers. See the
/// README for the exact grammar. Coefficient fields in the config are
/// constants; the library API accepts full (t, x) fields.
struct RunConfig {
    // [run]
    std::string scheme = "implicit-spacetime";  // explicit | implicit-time | implicit-spacetime
    std::string family = "spectral";            // spectral | fe
    int n = 8;
    int m = 16;
    double T = 1.0;

    // [operators]
    std::string operators = "linear-heat";  // linear-heat | example | sign-flipped
    double p = 2.0;
    double mu = 1.0;                // linear-heat drift scale, sign-flipped amplitude
    std::vector<double> sigma{1.0};  // per-channel noise amplitudes
    double a = 1.0;                 // example-family drift coefficient
    std::vector<double> b;          // gradient-noise coefficients
    std::vector<double> c;          // state-noise coefficients
    std::vector<double> d;          // additive-noise coefficients
    double epsilon = 1.0;

    // [initial]
    std::string profile = "sine1";  // sine1 | bump | zero

    // [mc]
    int paths = 1;
    std::uint64_t seed = 0;
    double gamma = 0.5;
    int workers = 1;
    bool deterministic = false;

    // [solver]
    double tolerance = 1e-10;
    int max_iterations = 200;
    int time_quad_points = 4;

    // [scan] explicit-scheme stability grid
    std::vector<int> scan_n;
    std::vector<int> scan_m;

    // [ladder] convergence levels and reference
    std::vector<int> ladder_n;
    std::vector<int> ladder_m;
    std::string reference = "self";  // oracle | self
    int ref_n = 0;
    int ref_m = 0;
    int finest_level = 12;

    // [output]
    std::string out_dir = "out";
    bool svg = false;
};

/// Parses the key-value text; throws ConfigError naming the offending
/// key on unknown keys or malformed values.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace sevo
