#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "sevo/noise.hpp"
#include "sevo/operators.hpp"
#include "sevo/schemes.hpp"
#include "sevo/spaces.hpp"

namespace sevo {

struct MCStat {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    int count = 0;
};

MCStat aggregate(const std::vector<double>& samples);

/// Exact per-mode Ornstein-Uhlenbeck reference for the linear additive
/// case: u_k(t + d) = e^{-mu_k d} u_k(t) + sigma_k c(d) dW_k with c
/// chosen so the transition variance (1 - e^{-2 mu d})/(2 mu) is exact,
/// driven by the shared increments at the tree's finest level.
struct OUOracle {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> u0;
    const DiscreteSpace* space = nullptr;  // spectral space carrying the modes

    Vec terminal(const Mat& dW_finest, double T) const;
    /// Values at the nodes of the coarse mesh of m steps (m must divide
    /// the number of finest-level increments).
    std::vector<Vec> at_nodes(const Mat& dW_finest, double T, int m) const;
};

struct SchemeSpec {
    SchemeKind kind = SchemeKind::ImplicitSpaceTime;
    const DiscreteSpace* space = nullptr;
    int m = 0;
};

using Reference = std::variant<const OUOracle*, SchemeSpec>;

struct ErrorReport {
    MCStat strong_h_error_sq;  // E |u(T) - ref(T)|_H^2
    MCStat weighted_v_error;   // E int |u(kappa2(s)) - ref(s)|_V^p lambda(s) ds
    double energy_sup_h = 0.0;
    double energy_sup_h_se = 0.0;
    MCStat energy_int_v;
    double rho = 0.0;
    bool gamma_class = false;
    int paths = 0;
    int aborted = 0;
    int n = 0, m = 0;
    double delta = 0.0;
};

struct RefNotFiner : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CouplingViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Monte Carlo strong-error estimate at T under coupled noise (one
/// WienerTree per path, finest level `finest_level` driving the
/// reference). `deterministic` replaces all increments by zero.
ErrorReport strong_error_at_T(const OperatorPair& pair, double T, const SchemeSpec& scheme,
                              const Reference& ref, int finest_level,
                              const std::function<double(double)>& u0_profile, int n_paths,
                              std::uint64_t seed, double gamma = 0.5, int workers = 1,
                              bool deterministic = false,
                              const SchemeOptions& opts = {});

/// Gronwall-style energy bound exp(int K1) (|u0|_H^2 + int [K1bar +
/// gamma K2 / alpha]).
double gronwall_bound(const StructuralConstants& constants, double u0_h_sq, double gamma,
                      double T);

struct EnergyLedger {
    double energy_sup_h = 0.0;
    double energy_sup_h_se = 0.0;
    MCStat energy_int_v;
    double bound = 0.0;
    bool within_bound = true;  // sup_h <= bound + 3 se
};

EnergyLedger energy_ledger(const std::vector<Trajectory>& trajectories, const OperatorPair& pair,
                           double u0_h_sq, double gamma);

struct ScanCell {
    int n = 0, m = 0;
    double rho = 0.0;
    bool stable = false;
    double energy_sup_h = 0.0;
    double bound = 0.0;
    int aborted = 0;
};

/// Explicit-scheme stability scan over an (n, m) grid. Deterministic
/// mode zeroes the noise and runs one path per cell.
std::vector<ScanCell> stability_scan(SpaceFamily family, const std::vector<int>& n_list,
                                     const std::vector<int>& m_list, const OperatorPair& pair,
                                     const std::function<double(double)>& u0_profile, int n_paths,
                                     double gamma, double T, std::uint64_t seed,
                                     bool deterministic, int workers = 1);

/// Time-integrated monotonicity gap of one trajectory against a
/// comparison process y on the same grid and space; under monotonicity the true
/// expectation is <= 0.
double monotonicity_gap(const OperatorPair& pair, const DiscreteSpace& space, const TimeGrid& grid,
                        const std::vector<Vec>& u_values, const std::vector<Vec>& y_values);

struct LadderLevel {
    int n = 0;
    int m = 0;
};

struct LadderConfig {
    SchemeKind kind = SchemeKind::ImplicitSpaceTime;
    SpaceFamily family = SpaceFamily::SpectralSine;
    std::vector<LadderLevel> levels;
    bool use_oracle = false;
    int ref_n = 0, ref_m = 0;        // self-refinement reference (implicit space-time)
    std::vector<double> oracle_sigma;  // per-mode noise amplitudes for the oracle
    double mu_scale = 1.0;             // oracle drift scale (linear heat)
    int finest_level = 12;
    int n_paths = 100;
    std::uint64_t seed = 0;
    double T = 1.0;
    double gamma = 0.5;
    int workers = 1;
    std::function<double(double)> u0_profile;
    SchemeOptions opts;
};

struct LadderReport {
    std::vector<ErrorReport> levels;
    bool slope_defined = false;
    double slope_log_err_sq = 0.0;  // least-squares slope of log err^2 vs log delta
    double fitted_order = 0.0;      // slope / 2: order of the error in delta
};

/// Coupled-refinement ladder: per-level strong errors plus the fitted
/// order in delta_m. Explicit ladders must have strictly decreasing rho
/// (CouplingViolated otherwise).
LadderReport convergence_ladder(const OperatorPair& pair, const LadderConfig& config);

/// Distances between elements of different spaces, by quadrature on a
/// fine common mesh (fast coefficient path when both are spectral).
double h_dist_sq(const DiscreteSpace& a_space, const Vec& a, const DiscreteSpace& b_space,
                 const Vec& b);
double v_dist_pow(const DiscreteSpace& a_space, const Vec& a, const DiscreteSpace& b_space,
                  const Vec& b, double p);

/// Runs fn(i) for i in [0, n) on `workers` threads; results must be
/// written to per-index slots so reduction order is deterministic.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace sevo
