// test_thermo.cpp — Regime table, COP figures, boundary lines, submachines and full reports

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "trimachine/thermo.hpp"

using namespace trimachine;
using namespace trimachine::thermo;

TEST(Thermo, RegimeTable) {
    EXPECT_EQ(classify_regime({1, -2, 1}, 0.0), Regime::IV);
    EXPECT_EQ(classify_regime({1, -3, 1}, 1.0), Regime::III);
    EXPECT_EQ(classify_regime({1, -0.5, -1}, 0.5), Regime::I);
    EXPECT_EQ(classify_regime({1, 0.5, -2}, 0.5), Regime::II);
    EXPECT_EQ(classify_regime({-1, 3, -1}, -1.0), Regime::VI);
    EXPECT_EQ(classify_regime({-1, 1, -1}, 1.0), Regime::V);
    EXPECT_EQ(classify_regime({-2, 1, 1}, 0.0), Regime::VIII);
    EXPECT_EQ(classify_regime({-3, 1, 1}, 1.0), Regime::VII);
    EXPECT_EQ(classify_regime({-1, -1, 2}, 0.0), Regime::X);
    EXPECT_EQ(classify_regime({-2, -1, 2}, 1.0), Regime::IX);
}

TEST(Thermo, PatternsOutsideTheTableAreUnclassified) {
    EXPECT_EQ(classify_regime({1, -1, -1}, -1.0), Regime::Unclassified);
    EXPECT_EQ(classify_regime({1, 1, -1}, -1.0), Regime::Unclassified);
    EXPECT_EQ(classify_regime({0, 0, 0}, 0.0), Regime::Unclassified);
    EXPECT_EQ(classify_regime({1, -1e-9, -1}, 1.0), Regime::Unclassified);
    EXPECT_THROW(classify_regime({1, 1, 1}, -3.0), ImpossibleRegimeError);
    EXPECT_THROW(classify_regime({-1, -1, -1}, 3.0), ImpossibleRegimeError);
    EXPECT_THROW(classify_regime({1, -2, 1}, 0.0, 0.0), DomainError);
}

TEST(Thermo, RegimeIsScaleInvariantAndBandsWork) {
    for (double s : {1e-20, 1e-8, 1.0, 1e12}) {
        EXPECT_EQ(classify_regime({s, -2 * s, s}, 0.0), Regime::IV);
        EXPECT_EQ(classify_regime({-2 * s, s, s}, 0.0), Regime::VIII);
    }
    EXPECT_EQ(classify_regime({1, -2, 1}, 1e-8), Regime::IV);   // W in the band counts as <= 0
    EXPECT_EQ(classify_regime({1, -2, 1}, 1e-4), Regime::III);
    EXPECT_EQ(classify_regime({1, -2, 1}, -1e-4), Regime::IV);
    EXPECT_EQ(classify_regime({1, -2, 1}, 1e-4, 1e-3), Regime::IV);
}

TEST(Thermo, RegimeNames) {
    for (int k = 0; k <= static_cast<int>(Regime::Unclassified); ++k) {
        const auto r = static_cast<Regime>(k);
        EXPECT_EQ(regime_from_string(to_string(r)), r);
    }
    EXPECT_THROW(regime_from_string("XI"), ConfigError);
}

TEST(Thermo, CopFigures) {
    const CopMetrics m = cop_metrics({0.2, -0.5, 0.4}, -0.1, {1, 2, 3}, {1.31, 3.0, 3.57});
    EXPECT_DOUBLE_EQ(*m.cop, 0.5);
    EXPECT_DOUBLE_EQ(*m.cop_w, 0.2 / 0.3);
    EXPECT_NEAR(*m.cop_max, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(*m.cop_otto, 0.12376, 5e-6);

    const CopMetrics undefined = cop_metrics({0.2, -0.2, 0.0}, 0.0, {1, 1, 3}, {1, 1, 3});
    EXPECT_FALSE(undefined.cop);
    EXPECT_FALSE(undefined.cop_w);
    EXPECT_FALSE(undefined.cop_max);
    EXPECT_FALSE(undefined.cop_otto);
}

TEST(Thermo, OttoCopEqualsWorkCorrectedRatio) {
    // With sum Q_i/B_i = 0 and W = -sum Q, cop_otto = (Q1 + Q1')/Q3, Q1' = -W B1/(B2 - B1).
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.1, 5.0), s(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::array<double, 3> B{u(rng), u(rng), u(rng)};
        const double Q1 = s(rng), Q3 = s(rng);
        const double Q2 = -B[1] * (Q1 / B[0] + Q3 / B[2]);
        const double W = -(Q1 + Q2 + Q3);
        const CopMetrics m = cop_metrics({Q1, Q2, Q3}, W, {1, 2, 3}, B);
        const double Q1p = -W * B[0] / (B[1] - B[0]);
        EXPECT_NEAR(*m.cop_otto, (Q1 + Q1p) / Q3, 1e-9 * std::max(1.0, std::abs(*m.cop_otto)));
    }
}

TEST(Thermo, BoundaryLines) {
    const RegimeBoundaries b = regime_boundaries({1, 2, 3});
    EXPECT_EQ(b.zero_work.slope, -1.0);
    EXPECT_EQ(b.zero_work.intercept, -1.0);
    EXPECT_EQ(b.zero_entropy.slope, -2.0);
    EXPECT_NEAR(b.zero_entropy.intercept, -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(b.zero_work.at(0.5), -1.5, 1e-15);
    EXPECT_NEAR(b.zero_entropy.at(1.0 / 3.0), -4.0 / 3.0, 1e-15);
    const auto x = b.intersection();
    EXPECT_NEAR(x[0], 1.0 / 3.0, 1e-15);   // equals cop_max
    EXPECT_NEAR(x[1], -4.0 / 3.0, 1e-15);
    EXPECT_THROW(regime_boundaries({1, 0, 3}), DomainError);

    // Points on each line give W = 0 or Sdot = 0 when Q3 = 1.
    for (double x1 : {-0.5, 0.1, 0.3}) {
        const double q2w = b.zero_work.at(x1), q2s = b.zero_entropy.at(x1);
        EXPECT_NEAR(-(x1 + q2w + 1.0), 0.0, 1e-15);
        EXPECT_NEAR(x1 / 1.0 + q2s / 2.0 + 1.0 / 3.0, 0.0, 1e-15);
    }
}

namespace {

// Continuity-consistent current set built from the three pair currents.
local_me::CurrentSet synthetic(double c21, double c31, double c32) {
    local_me::CurrentSet c;
    c.C = {c21, c31, c32};
    for (int i = 1; i <= 3; ++i) {
        double in = 0.0;
        for (int j = 1; j <= 3; ++j)
            if (j != i) in += c.current(j, i);
        c.q[i - 1] = -in;
    }
    return c;
}

} // namespace

TEST(Thermo, SubmachineEngine) {
    // Excitations move 3 -> 1: absorbed from the hot bath at B3, dumped at B1.
    const auto c = synthetic(0.0, 0.1, 0.0);
    EXPECT_DOUBLE_EQ(c.q[0], -0.1);
    EXPECT_DOUBLE_EQ(c.q[2], 0.1);
    const auto s = submachine_report(c, {0.4, 1.0, 1.6}, {1, 2, 3});
    const SubmachineFigures& f = s[model::pair_slot(1, 3)];
    EXPECT_EQ(f.role, Role::engine);
    EXPECT_NEAR(f.W_ij, 0.12, 1e-15);
    EXPECT_NEAR(f.Q_ij, 0.04, 1e-15);
    EXPECT_NEAR(f.Q_ji, -0.16, 1e-15);
    EXPECT_NEAR(f.W_ij, 0.4 * c.q[0] + 1.6 * c.q[2], 1e-15);
    EXPECT_NEAR(f.W_ij + f.Q_ij + f.Q_ji, 0.0, 1e-15);
    EXPECT_NEAR(*f.efficiency_or_cop, 0.75, 1e-15);
    EXPECT_EQ(s[model::pair_slot(1, 2)].role, Role::idle);
    EXPECT_EQ(s[model::pair_slot(2, 3)].role, Role::idle);
}

TEST(Thermo, SubmachineRefrigeratorAndAccelerator) {
    const auto c = synthetic(0.0, -0.1, 0.0);
    const auto fridge = submachine_report(c, {0.4, 1.0, 1.6}, {1, 2, 3})[model::pair_slot(1, 3)];
    EXPECT_EQ(fridge.role, Role::refrigerator);
    EXPECT_NEAR(*fridge.efficiency_or_cop, 1.0 / 3.0, 1e-15);
    const auto acc = submachine_report(c, {0.4, 1.0, 1.6}, {3, 2, 1})[model::pair_slot(1, 3)];
    EXPECT_EQ(acc.role, Role::accelerator);
    EXPECT_FALSE(acc.efficiency_or_cop);
}

TEST(Thermo, SubmachineRejectsDiscontinuousCurrents) {
    auto c = synthetic(0.05, -0.1, 0.02);
    c.q[1] += 1e-3;
    EXPECT_THROW(submachine_report(c, {0.4, 1.0, 1.6}, {1, 2, 3}), DomainError);
}

TEST(Thermo, OttoConditions) {
    const OttoConditions o = otto_conditions_and_trapezoid({1.31, 3.0, 3.57}, {1, 2, 3});
    EXPECT_TRUE(o.inside_trapezoid);
    EXPECT_EQ(o.pair_roles[model::pair_slot(1, 2)], OttoRole::refrigerator);
    EXPECT_EQ(o.pair_roles[model::pair_slot(1, 3)], OttoRole::engine);
    EXPECT_EQ(o.pair_roles[model::pair_slot(2, 3)], OttoRole::engine);

    EXPECT_FALSE(otto_conditions_and_trapezoid({1.0, 2.5, 4.0}, {1, 2, 3}).inside_trapezoid);
    EXPECT_FALSE(otto_conditions_and_trapezoid({2.0, 3.0, 3.5}, {1, 2, 3}).inside_trapezoid);
    EXPECT_FALSE(otto_conditions_and_trapezoid({1.0, 4.0, 3.5}, {1, 2, 3}).inside_trapezoid);
    const OttoConditions acc = otto_conditions_and_trapezoid({3.0, 2.0, 1.0}, {1, 2, 3});
    for (OttoRole r : acc.pair_roles) EXPECT_EQ(r, OttoRole::accelerator);
    EXPECT_EQ(otto_conditions_and_trapezoid({1.0, 2.0, 3.0}, {1, 2, 3}).pair_roles[0], OttoRole::boundary);
    EXPECT_THROW(otto_conditions_and_trapezoid({0.0, 2.0, 3.0}, {1, 2, 3}), DomainError);
}

TEST(Thermo, LocalReportAtBoostPoint) {
    const model::ModelParams p = testing_support::fig5_params(3.0);
    const steady::Generator g = steady::assemble(p);
    const ThermoReport r = analyze(g, steady::solve(g));
    EXPECT_TRUE(r.flags.empty());
    EXPECT_LE(std::abs(r.first_law_residual), 1e-12);
    EXPECT_GE(r.S_dot, 0.0);
    ASSERT_EQ(r.submachines.size(), 3u);
    ASSERT_TRUE(r.otto);
    EXPECT_TRUE(r.otto->inside_trapezoid);
    EXPECT_EQ(r.submachines[model::pair_slot(2, 3)].role, Role::engine);
    EXPECT_EQ(r.submachines[model::pair_slot(1, 2)].role, Role::refrigerator);
    double total = r.W;
    for (const SubmachineFigures& f : r.submachines) total += f.W_ij;
    EXPECT_LE(std::abs(total), 1e-10 * heat_scale(r));
}

TEST(Thermo, HarmonicReportHasNoWork) {
    model::ModelParams p = testing_support::fig1_params();
    p.B = {0.8, 0.5, 0.3};
    const steady::Generator g = steady::assemble(p);
    const ThermoReport r = analyze(g, steady::solve(g));
    EXPECT_EQ(r.W, 0.0);
    EXPECT_TRUE(r.flags.empty());
    EXPECT_TRUE(r.submachines.empty());
    EXPECT_LE(std::abs(r.first_law_residual), 1e-10 * heat_scale(r));
    EXPECT_NE(r.regime, Regime::Unclassified);
}
