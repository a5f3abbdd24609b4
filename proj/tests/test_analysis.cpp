#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sevo/analysis.hpp"

using namespace sevo;

namespace {
const double kPi = std::acos(-1.0);

std::function<double(double)> sine1() {
    return [](double x) { return std::sqrt(2.0) * std::sin(kPi * x); };
}

OperatorPair zero_pair() {
    OperatorPair pair;
    pair.r = 1;
    pair.autonomous = true;
    pair.flux = [](double, double, double) { return 0.0; };
    pair.flux_dz = [](double, double, double) { return 0.0; };
    pair.g = [](double, double, double, int) { return 0.0; };
    pair.h = [](double, double, double, int) { return 0.0; };
    pair.constants.p = 2.0;
    pair.constants.lambda_fn = [](double) { return 1.0; };
    pair.constants.k1_fn = [](double) { return 0.0; };
    pair.constants.k1bar_fn = [](double) { return 0.0; };
    pair.constants.k2_fn = [](double) { return 0.0; };
    return pair;
}
}  // namespace

TEST_CASE("aggregate: mean and standard error") {
    MCStat st = aggregate({1.0, 2.0, 3.0, 4.0});
    CHECK(st.mean == doctest::Approx(2.5));
    // sample variance 5/3, se = sqrt(5/12)
    CHECK(st.se == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-12));
    CHECK(st.count == 4);
    CHECK(aggregate({}).count == 0);
}

TEST_CASE("cross-space distances: zero self-distance, spectral fast path") {
    DiscreteSpace a = build_space(SpaceFamily::SpectralSine, 3);
    DiscreteSpace b = build_space(SpaceFamily::SpectralSine, 6);
    Vec va(3);
    va << 1.0, -2.0, 0.5;
    Vec vb = Vec::Zero(6);
    vb.head(3) = va;
    CHECK(h_dist_sq(a, va, b, vb) == 0.0);
    CHECK(v_dist_pow(a, va, b, vb, 2.0) == doctest::Approx(0.0));

    vb[5] = 2.0;  // extra fine mode: distance is its norm
    CHECK(h_dist_sq(a, va, b, vb) == doctest::Approx(4.0).epsilon(1e-12));
    double expect_v = 4.0 * (1.0 + 36.0 * kPi * kPi);
    CHECK(v_dist_pow(a, va, b, vb, 2.0) == doctest::Approx(expect_v).epsilon(1e-10));
}

TEST_CASE("OU oracle: deterministic decay and noise statistics") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 2);
    OUOracle oracle;
    oracle.space = &s;
    oracle.mu = {kPi * kPi, 4.0 * kPi * kPi};
    oracle.sigma = {0.0, 0.0};
    oracle.u0 = {1.0, -0.5};

    Mat zero_inc = Mat::Zero(2, 64);
    Vec uT = oracle.terminal(zero_inc, 1.0);
    CHECK(uT[0] == doctest::Approx(std::exp(-kPi * kPi)).epsilon(1e-12));
    CHECK(uT[1] == doctest::Approx(-0.5 * std::exp(-4.0 * kPi * kPi)).epsilon(1e-10));

    // E|u(T)|^2 with u0 = 0 equals sigma^2 (1 - e^{-2 mu T}) / (2 mu).
    oracle.sigma = {1.0, 0.0};
    oracle.u0 = {0.0, 0.0};
    const int n_paths = 4000;
    double acc = 0.0;
    for (int path = 0; path < n_paths; ++path) {
        WienerTree tree = sample_path(2, 1.0, 6, 31337, path);
        Vec u = oracle.terminal(increments(tree, 64), 1.0);
        acc += u.squaredNorm();
    }
    double expect = (1.0 - std::exp(-2.0 * kPi * kPi)) / (2.0 * kPi * kPi);
    CHECK(acc / n_paths == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("strong error: self-comparison is exactly zero") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    SchemeSpec spec{SchemeKind::ImplicitSpaceTime, &s, 8};
    ErrorReport rep = strong_error_at_T(heat, 1.0, spec, Reference{spec}, 6, sine1(), 20, 1);
    CHECK(rep.strong_h_error_sq.mean == 0.0);
    CHECK(rep.weighted_v_error.mean == 0.0);
    CHECK(rep.aborted == 0);
}

TEST_CASE("strong error: deterministic heat matches the closed form") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 1);
    OUOracle oracle;
    oracle.space = &s;
    oracle.mu = {kPi * kPi};
    oracle.sigma = {0.0};
    oracle.u0 = {1.0};
    OperatorPair heat = make_linear_heat(1.0, {0.0});
    const int m = 16;
    SchemeSpec spec{SchemeKind::ImplicitSpaceTime, &s, m};
    ErrorReport rep = strong_error_at_T(heat, 1.0, spec, Reference{&oracle}, 6, sine1(), 1, 0,
                                        0.5, 1, /*deterministic=*/true);
    double res = 1.0 / (1.0 + kPi * kPi / m);
    double expect = std::pow(std::pow(res, m) - std::exp(-kPi * kPi), 2.0);
    CHECK(rep.strong_h_error_sq.mean == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("strong error: reference must be finer (or identical)") {
    DiscreteSpace coarse = build_space(SpaceFamily::SpectralSine, 2);
    DiscreteSpace fine = build_space(SpaceFamily::SpectralSine, 4);
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    SchemeSpec spec{SchemeKind::ImplicitSpaceTime, &fine, 8};
    SchemeSpec worse{SchemeKind::ImplicitSpaceTime, &coarse, 8};
    CHECK_THROWS_AS(
        strong_error_at_T(heat, 1.0, spec, Reference{worse}, 6, sine1(), 4, 0),
        RefNotFiner);
    // Non-nested time meshes rejected too.
    SchemeSpec spec12{SchemeKind::ImplicitSpaceTime, &coarse, 8};
    SchemeSpec ref12{SchemeKind::ImplicitSpaceTime, &fine, 12};
    CHECK_THROWS_AS(
        strong_error_at_T(heat, 1.0, spec12, Reference{ref12}, 6, sine1(), 4, 0),
        RefNotFiner);
}

TEST_CASE("gronwall bound and energy ledger closed forms") {
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    // K1 = 2, K1bar = 0.25, K2 = 0: bound = e^2 (|u0|^2 + 0.25).
    double b = gronwall_bound(heat.constants, 1.0, 0.5, 1.0);
    CHECK(b == doctest::Approx(std::exp(2.0) * 1.25).epsilon(1e-10));

    // A = B = 0: energy_sup_h = |Pi u0|^2 exactly.
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 3);
    OperatorPair zp = zero_pair();
    TimeGrid grid{1.0, 8};
    Vec u0 = project(s, sine1());
    std::vector<Trajectory> trajs;
    for (int i = 0; i < 3; ++i)
        trajs.push_back(run_explicit(s, grid, zp, u0, Mat::Zero(1, 8)));
    EnergyLedger led = energy_ledger(trajs, zp, u0.squaredNorm(), 0.5);
    CHECK(led.energy_sup_h == doctest::Approx(u0.squaredNorm()).epsilon(1e-14));
    CHECK(led.within_bound);
}

TEST_CASE("stability scan: deterministic explicit boundary") {
    OperatorPair heat = make_linear_heat(1.0, {});
    auto profile = [](double x) { return x * (1.0 - x) * std::exp(x); };
    std::vector<int> ns{1, 2, 3};
    std::vector<int> ms{8, 32, 128};
    std::vector<ScanCell> cells = stability_scan(SpaceFamily::SpectralSine, ns, ms, heat,
                                                 profile, 1, 0.5, 1.0, 0, true);
    REQUIRE(cells.size() == 9);
    for (const ScanCell& c : cells) {
        double crit = (1.0 / c.m) * kPi * kPi * c.n * c.n;  // largest-mode delta mu
        bool predicted_stable = crit <= 2.0;
        // Within one grid cell of the boundary the label may go either way.
        bool boundary = (crit > 2.0 && crit / 2.0 <= 2.0) || (crit <= 2.0 && crit * 2.0 > 2.0);
        if (!boundary) CHECK(c.stable == predicted_stable);
    }
}

TEST_CASE("monotonicity gap: self gap zero, heat negative, flipped positive") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 3);
    OperatorPair heat = make_linear_heat(1.0, {0.4});
    TimeGrid grid{1.0, 8};
    Vec u0 = project(s, sine1());
    Trajectory u = run_implicit_spacetime(s, grid, heat, u0, direct_increments(1, 1.0, 8, 5, 0));
    Trajectory y = run_implicit_spacetime(s, grid, heat, u0, direct_increments(1, 1.0, 8, 5, 1));

    std::vector<Vec> y_steps(y.values.begin(), y.values.end() - 1);
    CHECK(monotonicity_gap(heat, s, grid, u.values,
                           std::vector<Vec>(u.values.begin(), u.values.end() - 1)) <= 1e-12);
    double gap = monotonicity_gap(heat, s, grid, u.values, y_steps);
    CHECK(gap <= 1e-12);

    OperatorPair bad = make_sign_flipped(2.0, 1.0, {0.4});
    double bad_gap = monotonicity_gap(bad, s, grid, u.values, y_steps);
    CHECK(bad_gap > 0.0);
}

TEST_CASE("convergence ladder: slope bookkeeping and coupling guards") {
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    LadderConfig lc;
    lc.kind = SchemeKind::ImplicitSpaceTime;
    lc.levels = {{4, 8}};
    lc.use_oracle = true;
    lc.oracle_sigma = {0.5};
    lc.mu_scale = 1.0;
    lc.finest_level = 7;
    lc.n_paths = 10;
    lc.u0_profile = sine1();
    LadderReport single = convergence_ladder(heat, lc);
    CHECK_FALSE(single.slope_defined);

    // Explicit ladder with non-decreasing rho is rejected.
    LadderConfig bad = lc;
    bad.kind = SchemeKind::ExplicitSpaceTime;
    bad.levels = {{2, 64}, {4, 64}};
    CHECK_THROWS_AS(convergence_ladder(heat, bad), CouplingViolated);
}

TEST_CASE("bitwise reproducibility across runs and worker counts") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    OperatorPair heat = make_linear_heat(1.0, {0.5, 0.25, 0.1, 0.1});
    SchemeSpec spec{SchemeKind::ImplicitSpaceTime, &s, 8};
    SchemeSpec ref{SchemeKind::ImplicitSpaceTime, &s, 32};

    ErrorReport r1 = strong_error_at_T(heat, 1.0, spec, Reference{ref}, 6, sine1(), 40, 7, 0.5, 1);
    ErrorReport r2 = strong_error_at_T(heat, 1.0, spec, Reference{ref}, 6, sine1(), 40, 7, 0.5, 1);
    ErrorReport r4 = strong_error_at_T(heat, 1.0, spec, Reference{ref}, 6, sine1(), 40, 7, 0.5, 4);
    CHECK(r1.strong_h_error_sq.mean == r2.strong_h_error_sq.mean);
    CHECK(r1.strong_h_error_sq.mean == r4.strong_h_error_sq.mean);
    CHECK(r1.weighted_v_error.mean == r4.weighted_v_error.mean);
    CHECK(r1.energy_sup_h == r4.energy_sup_h);
    CHECK(r1.strong_h_error_sq.mean > 0.0);
}
