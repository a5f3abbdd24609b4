#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sevo/operators.hpp"
#include "sevo/quadrature.hpp"
#include "sevo/rng.hpp"

using namespace sevo;

namespace {
const double kPi = std::acos(-1.0);

Vec random_coeffs(int dim, std::uint64_t salt) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v[k] = rng::normal({salt, (std::uint64_t)k}) / (k + 1.0);
    return v;
}

Field constant(double v) {
    return [v](double, double) { return v; };
}
}  // namespace

TEST_CASE("linear heat drift: spectral eigenpairings") {
    OperatorPair heat = make_linear_heat(1.0, {1.0});
    DiscreteSpace v2 = build_space(SpaceFamily::SpectralSine, 2);
    Vec e1 = Vec::Unit(2, 0);
    Vec d = assemble_drift(heat, v2, 0.3, e1);
    CHECK(d[0] == doctest::Approx(-kPi * kPi).epsilon(1e-10));
    CHECK(std::abs(d[1]) < 1e-10);

    // Additive diffusion: independent of the state.
    Vec u = random_coeffs(2, 4);
    Vec b_at_u = assemble_diffusion(heat, v2, 0.0, u, 0);
    Vec b_at_0 = assemble_diffusion(heat, v2, 0.0, Vec::Zero(2), 0);
    CHECK((b_at_u - b_at_0).norm() < 1e-14);
    CHECK(b_at_0[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("example family reduces to linear heat at p=2") {
    OperatorPair fam = make_example_family(2.0, constant(1.0), {}, {}, {}, 1.0);
    OperatorPair heat = make_linear_heat(1.0, {});
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    Vec u = random_coeffs(4, 12);
    CHECK((assemble_drift(fam, s, 0.5, u) - assemble_drift(heat, s, 0.5, u)).norm() < 1e-10);
}

TEST_CASE("p=4 drift: dissipative pairing and doubled-quadrature oracle") {
    OperatorPair fam = make_example_family(4.0, constant(1.0), {}, {}, {}, 1.0);
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    for (int trial = 0; trial < 20; ++trial) {
        Vec u = random_coeffs(4, 100 + trial);
        CHECK(drift_pairing(fam, s, 0.0, u, u) <= 1e-12);
    }

    // Entry 1 for u = e_1 equals -int |u'|^2 u' e_1' at doubled order.
    Vec e1 = Vec::Unit(4, 0);
    Vec d = assemble_drift(fam, s, 0.0, e1);
    QuadratureRule fine = gauss_legendre(64);
    double oracle = 0.0;
    for (int q = 0; q < fine.size(); ++q) {
        double du = std::sqrt(2.0) * kPi * std::cos(kPi * fine.nodes[q]);
        oracle -= fine.weights[q] * du * du * du * du;
    }
    CHECK(d[0] == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("example family positivity gating") {
    // 2(p-1)a - (1+eps) b^2 = 6 - 1.1 = 4.9 >= 0: accepted.
    CHECK_NOTHROW(make_example_family(4.0, constant(1.0), {constant(1.0)}, {}, {}, 0.1));
    // b too large: 6 - 1.1 * 9 < 0: rejected.
    CHECK_THROWS_AS(make_example_family(4.0, constant(1.0), {constant(3.0)}, {}, {}, 0.1),
                    std::invalid_argument);
}

TEST_CASE("drift and diffusion vanish at zero state when d = 0") {
    OperatorPair fam = make_example_family(4.0, constant(1.0), {}, {constant(1.0)}, {}, 0.5);
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 3);
    Vec zero = Vec::Zero(3);
    CHECK(assemble_drift(fam, s, 0.2, zero).norm() < 1e-14);
    CHECK(assemble_diffusion(fam, s, 0.2, zero, 0).norm() < 1e-14);
}

TEST_CASE("state noise h = c|u|: doubled-quadrature oracle") {
    OperatorPair fam = make_example_family(2.0, constant(1.0), {}, {constant(1.0)}, {}, 0.5);
    DiscreteSpace v1 = build_space(SpaceFamily::SpectralSine, 1);
    Vec e1 = Vec::Unit(1, 0);
    Vec b = assemble_diffusion(fam, v1, 0.0, e1, 0);
    QuadratureRule fine = gauss_legendre(96);
    double oracle = 0.0;
    for (int q = 0; q < fine.size(); ++q) {
        double val = std::sqrt(2.0) * std::sin(kPi * fine.nodes[q]);
        oracle += fine.weights[q] * std::abs(val) * val;
    }
    CHECK(b[0] == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("structural constants: conjugate exponents and K3") {
    OperatorPair heat = make_linear_heat(2.0, {0.5, 0.5});
    const StructuralConstants& c = heat.constants;
    CHECK(c.q() == doctest::Approx(2.0));
    CHECK(c.k3(0.1) == doctest::Approx(c.k1bar_fn(0.1) + (2.0 / c.q()) * c.k2_fn(0.1)));

    // Integrability by quadrature.
    QuadratureRule rule = gauss_legendre(16, 0.0, 1.0);
    double int_lambda = 0.0;
    for (int q = 0; q < rule.size(); ++q) int_lambda += rule.weights[q] * c.lambda_fn(rule.nodes[q]);
    CHECK(int_lambda == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("time averages: boundary convention, autonomous shortcut, ramp factor") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 2);
    TimeGrid grid{1.0, 2};

    OperatorPair heat = make_linear_heat(1.0, {1.0});
    AveragedOperators avg{&heat, &s, grid, 4};
    Vec u = random_coeffs(2, 31);

    CHECK(avg.a_tilde(0, u).norm() == 0.0);
    CHECK(avg.b_tilde(0, u, 0).norm() == 0.0);
    Vec direct = assemble_drift(heat, s, 0.0, u);
    CHECK((avg.a_tilde(1, u) - direct).norm() < 1e-10);
    CHECK((avg.a_fwd(1, u) - direct).norm() < 1e-10);

    // Time-ramp drift A_t = t * heat: backward average over [0, 1/2]
    // is (1/delta) int_0^{1/2} t dt = 0.25 of the autonomous assembly.
    OperatorPair ramp = heat;
    ramp.autonomous = false;
    ramp.flux = [](double t, double, double z) { return t * z; };
    ramp.flux_dz = [](double t, double, double) { return t; };
    AveragedOperators ravg{&ramp, &s, grid, 8};
    CHECK((ravg.a_tilde(1, u) - 0.25 * direct).norm() < 1e-10 * direct.norm());
    // Forward average over [1/2, 1]: factor 0.75.
    CHECK((ravg.a_fwd(1, u) - 0.75 * direct).norm() < 1e-10 * direct.norm());
}

TEST_CASE("averaging linearity against stepwise quadrature") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 2);
    TimeGrid grid{1.0, 4};
    OperatorPair ramp = make_linear_heat(1.0, {1.0});
    ramp.autonomous = false;
    ramp.flux = [](double t, double, double z) { return (1.0 + t * t) * z; };
    ramp.flux_dz = [](double t, double, double) { return 1.0 + t * t; };
    AveragedOperators avg{&ramp, &s, grid, 8};
    Vec u = random_coeffs(2, 77);

    QuadratureRule rule = gauss_legendre(8, grid.node(1), grid.node(2));
    Vec manual = Vec::Zero(2);
    for (int q = 0; q < rule.size(); ++q)
        manual += rule.weights[q] * assemble_drift(ramp, s, rule.nodes[q], u);
    manual /= grid.delta();
    CHECK((avg.a_tilde(2, u) - manual).norm() < 1e-10 * (1.0 + manual.norm()));
}

TEST_CASE("condition checks: clean pairs pass, x = y has zero margin") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    OperatorPair heat = make_linear_heat(1.0, {0.5});
    ConditionReport rep = check_conditions(heat, s, 2000, 13);
    CHECK(rep.mono.violations == 0);
    CHECK(rep.coercivity.violations == 0);
    CHECK(rep.growth.violations == 0);
    CHECK(rep.diff_bound.violations == 0);

    OperatorPair fam = make_example_family(4.0, constant(1.0), {constant(0.5)},
                                           {constant(0.1)}, {constant(0.1)}, 0.5);
    ConditionReport rep2 = check_conditions(fam, s, 2000, 14);
    CHECK(rep2.mono.violations == 0);
    CHECK(rep2.coercivity.violations == 0);
    CHECK(rep2.growth.violations == 0);
    CHECK(rep2.diff_bound.violations == 0);

    // x = y: the monotonicity left side is exactly 0.
    Vec x = random_coeffs(4, 900);
    double lhs = 2.0 * (drift_pairing(heat, s, 0.1, x, Vec::Zero(4)) -
                        drift_pairing(heat, s, 0.1, x, Vec::Zero(4))) +
                 diffusion_diff_h_norm_sq(heat, s, 0.1, x, x);
    CHECK(lhs == 0.0);
}

TEST_CASE("condition checks: sign-flipped drift is detected") {
    DiscreteSpace s = build_space(SpaceFamily::SpectralSine, 4);
    OperatorPair bad = make_sign_flipped(2.0, 1.0, {0.5});
    ConditionReport rep = check_conditions(bad, s, 500, 15);
    CHECK(rep.mono.violations > 0);
    CHECK(rep.mono.min_margin < 0.0);
}
