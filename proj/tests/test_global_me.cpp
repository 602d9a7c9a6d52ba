// test_global_me.cpp — Spectrum, global jump operators, harmonic-bath dissipators and currents

#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "trimachine/global_me.hpp"
#include "trimachine/steady_state.hpp"

using namespace trimachine;
using namespace trimachine::global_me;
using testing_support::cplx;

namespace {

model::ModelParams fig1_with_fields(double b1, double b2, double b3) {
    model::ModelParams p = testing_support::fig1_params();
    p.B = {b1, b2, b3};
    return p;
}

DenseOperator sigma_x_reconstruction(const JumpSet& js) {
    DenseOperator s = js.discarded;
    for (const auto& j : js.jumps) s += j.A + j.A.adjoint();
    return s;
}

} // namespace

TEST(GlobalMe, SpectrumReconstructsHamiltonian) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        model::ModelParams p = testing_support::fig2_params();
        p.B = {5 * u(rng), 5 * u(rng), 5 * u(rng)};
        const DenseOperator H = model::build_hamiltonian(p);
        const Spectrum s = compute_spectrum(H);
        const DenseOperator V = s.eigenvectors;
        const DenseOperator E = s.energies.cast<cplx>().asDiagonal();
        EXPECT_LE((H - V * E * V.adjoint()).norm(), 1e-10 * H.norm());
        EXPECT_LE((V.adjoint() * V - DenseOperator::Identity(8, 8)).norm(), 1e-12);
        for (int k = 1; k < 8; ++k) EXPECT_LE(s.energies(k - 1), s.energies(k));
        for (int k = 0; k < 8; ++k) {
            const DenseOperator M = model::magnetization_operator();
            const Eigen::VectorXcd v = V.col(k);
            EXPECT_NEAR((M * v - double(s.sector_labels[k]) * v).norm(), 0.0, 1e-12);
        }
    }
}

TEST(GlobalMe, SpectrumRejectsNonConservingHamiltonian) {
    const DenseOperator H = spin::embed_pauli(1, spin::Axis::x, 3);
    EXPECT_THROW(compute_spectrum(H), DomainError);
}

TEST(GlobalMe, SingleQubitJump) {
    const DenseOperator H = spin::pauli(spin::Axis::z);  // B = 1
    const Spectrum s = compute_spectrum(H, 1);
    const JumpSet js = jump_operators(s, 1, 1e-9);
    ASSERT_EQ(js.jumps.size(), 1u);
    EXPECT_NEAR(js.jumps[0].omega, 2.0, 1e-14);
    EXPECT_LE((js.jumps[0].A - spin::pauli(spin::Axis::minus)).norm(), 1e-14);
}

TEST(GlobalMe, UncoupledSitesHaveSingleFrequency) {
    model::ModelParams p;
    p.B = {1, 2, 3};
    p.gamma = {1, 1, 1};
    const Spectrum s = compute_spectrum(model::build_hamiltonian(p));
    for (int site = 1; site <= 3; ++site) {
        const JumpSet js = jump_operators(s, site, default_degeneracy_tol(s));
        ASSERT_EQ(js.jumps.size(), 1u);
        EXPECT_NEAR(js.jumps[0].omega, 2.0 * site, 1e-12);
        EXPECT_LE((js.jumps[0].A - spin::embed_pauli(site, spin::Axis::minus, 3)).norm(), 1e-12);
    }
}

TEST(GlobalMe, JumpSetCompletenessAndSectorRule) {
    const Spectrum s = compute_spectrum(model::build_hamiltonian(fig1_with_fields(0.8, 0.5, 0.3)));
    for (int site = 1; site <= 3; ++site) {
        const JumpSet js = jump_operators(s, site, default_degeneracy_tol(s));
        const DenseOperator sx = spin::embed_pauli(site, spin::Axis::x, 3);
        EXPECT_LE((sigma_x_reconstruction(js) - sx).norm(), 1e-10);
        double weight = js.discarded.squaredNorm();
        for (const auto& j : js.jumps) {
            EXPECT_GT(j.omega, js.degeneracy_tol);
            weight += 2.0 * j.A.squaredNorm();
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                    if (std::abs(j.A_energy(a, b)) > 1e-12) {
                        EXPECT_EQ(std::abs(s.sector_labels[a] - s.sector_labels[b]), 2);
                    }
        }
        EXPECT_NEAR(weight, (sx * sx).trace().real(), 1e-10);
    }
}

TEST(GlobalMe, JumpOperatorsLowerEnergy) {
    // [H, A_w] = -w A_w
    const DenseOperator H = model::build_hamiltonian(fig1_with_fields(0.9, 0.45, 0.2));
    const Spectrum s = compute_spectrum(H);
    for (int site = 1; site <= 3; ++site)
        for (const auto& j : jump_operators(s, site, default_degeneracy_tol(s)).jumps)
            EXPECT_LE((H * j.A - j.A * H + j.omega * j.A).norm(), 1e-8 * std::max(1.0, j.A.norm()));
}

TEST(GlobalMe, OverlappingClustersAreRejected) {
    // Chained Bohr frequencies with spacing below tol but total spread above 10 tol.
    Spectrum s;
    s.n_sites = 3;
    const double tol = 1e-3;
    s.energies.resize(8);
    s.energies << 0.0, 5.5, 7.8, 11.1, 12.8, 15.9, 17.5, 19.9;
    s.energies *= tol;
    std::mt19937_64 rng(6);
    s.eigenvectors = testing_support::random_unitary(rng, 8);
    s.sector_labels.assign(8, 0);
    EXPECT_THROW(jump_operators(s, 1, tol), ClusteringError);
    EXPECT_THROW(jump_operators(s, 1, 0.0), DomainError);
}

TEST(GlobalMe, BoseOccupation) {
    EXPECT_NEAR(bose_occupation(1.0, 1.0 / std::log(2.0)), 1.0, 1e-14);
    EXPECT_NEAR(bose_occupation(1.0, 1e-3), 0.0, 1e-300);
    EXPECT_NEAR(bose_occupation(2.0, 2.0), 1.0 / (std::exp(1.0) - 1.0), 1e-15);
    EXPECT_NEAR(bose_occupation(2.0, 2.0), 0.5819767068693265, 1e-15);
    EXPECT_THROW(bose_occupation(0.0, 1.0), DomainError);
    EXPECT_THROW(bose_occupation(-1.0, 1.0), DomainError);
    EXPECT_THROW(bose_occupation(1.0, 0.0), DomainError);
}

TEST(GlobalMe, DissipatorIsTracePreserving) {
    const Spectrum s = compute_spectrum(model::build_hamiltonian(fig1_with_fields(0.8, 0.5, 0.3)));
    std::mt19937_64 rng(7);
    for (int site = 1; site <= 3; ++site) {
        const SuperOperator L = global_dissipator(jump_operators(s, site, default_degeneracy_tol(s)), 0.3, 1.5);
        for (int trial = 0; trial < 100; ++trial) {
            const DenseOperator rho = testing_support::random_density(rng, 8);
            EXPECT_LE(std::abs(spin::apply(L, rho).trace()), 1e-12 * spin::one_norm(L));
        }
    }
}

TEST(GlobalMe, EnergyBasisDissipatorIsSameMap) {
    const Spectrum s = compute_spectrum(model::build_hamiltonian(fig1_with_fields(0.8, 0.5, 0.3)));
    const JumpSet js = jump_operators(s, 2, default_degeneracy_tol(s));
    const SuperOperator L = global_dissipator(js, 0.3, 1.5);
    const auto Le = global_dissipator_energy_basis<long double>(js, 0.3, 1.5);
    const DenseOperator& V = s.eigenvectors;
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const DenseOperator rho = testing_support::random_density(rng, 8);
        const DenseOperator direct = V.adjoint() * spin::apply(L, rho) * V;
        const spin::Op<long double> rho_e = (V.adjoint() * rho * V).cast<std::complex<long double>>();
        const DenseOperator via_e = spin::apply(Le, rho_e).cast<cplx>();
        EXPECT_LE((direct - via_e).norm(), 1e-12 * direct.norm());
    }
}

TEST(GlobalMe, SingleQubitDetailedBalance) {
    const double B = 0.7, T = 1.3;
    const DenseOperator H = B * spin::pauli(spin::Axis::z);
    const Spectrum s = compute_spectrum(H, 1);
    const SuperOperator L =
        spin::commutator_superop(H) + global_dissipator(jump_operators(s, 1, 1e-9), 0.2, T);
    const steady::SteadyStateResult r = steady::solve_steady_state(L);
    EXPECT_NEAR(r.rho(0, 0).real() / r.rho(1, 1).real(), std::exp(-2.0 * B / T), 1e-12);
}

TEST(GlobalMe, EqualTemperaturesGiveGibbsState) {
    for (double T : {0.5, 2.0}) {
        model::ModelParams p = fig1_with_fields(0.8, 0.5, 0.3);
        p.T = {T, T, T};
        const steady::Generator g = steady::assemble(p);
        const steady::Solution sol = steady::solve(g);
        EXPECT_LE(spin::trace_distance(sol.state.rho, steady::gibbs_state(g.H, T)), 1e-8);
    }
}

TEST(GlobalMe, UncoupledAndEquilibriumCurrentsVanish) {
    model::ModelParams p = fig1_with_fields(0.8, 0.5, 0.3);
    p.J = {0, 0, 0};
    p.Delta = {0, 0, 0};
    steady::Generator g = steady::assemble(p);
    steady::Solution sol = steady::solve(g);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(global_heat_current(sol.state.rho, g.H, g.dissipators[k]), 0.0, 1e-18);

    p = fig1_with_fields(0.8, 0.5, 0.3);
    p.T = {2, 2, 2};
    g = steady::assemble(p);
    sol = steady::solve(g);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(global_heat_current(sol.state.rho, g.H, g.dissipators[k]), 0.0, 1e-18);
}

TEST(GlobalMe, FirstAndSecondLawAtReferencePoint) {
    const steady::Generator g = steady::assemble(fig1_with_fields(0.8, 0.5, 0.3));
    const steady::Solution sol = steady::solve(g);
    spin::Op<long double> E = spin::Op<long double>::Zero(8, 8);
    for (int k = 0; k < 8; ++k) E(k, k) = g.spectrum->energies(k);
    std::array<double, 3> Q{};
    for (int k = 0; k < 3; ++k)
        Q[k] = static_cast<double>(global_heat_current<long double>(sol.rho_energy, E, g.energy_dissipators[k]));
    const double qmax = std::max({std::abs(Q[0]), std::abs(Q[1]), std::abs(Q[2])});
    EXPECT_GT(qmax, 0.0);
    EXPECT_LE(std::abs(Q[0] + Q[1] + Q[2]), 1e-10 * qmax);
    EXPECT_GE(entropy_production(Q, g.params.T), 0.0);

    // The computational-basis route agrees with the energy-basis one.
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(global_heat_current(sol.state.rho, g.H, g.dissipators[k]), Q[k], 1e-6 * qmax);

    // and the state agrees with the long-time evolution oracle.
    const steady::SteadyStateResult ev = steady::steady_state_by_evolution(g.total);
    EXPECT_LE(spin::trace_distance(ev.rho, sol.state.rho), 1e-8);
}

TEST(GlobalMe, EntropyProductionArithmetic) {
    EXPECT_EQ(entropy_production({0, 0, 0}, {1, 2, 3}), 0.0);
    EXPECT_NEAR(entropy_production({1, 0, -1}, {1, 2, 3}), -2.0 / 3.0, 1e-15);
    EXPECT_THROW(entropy_production({1, 0, -1}, {1, 0, 3}), DomainError);
}

TEST(GlobalMe, HeatCurrentRejectsUnnormalizedState) {
    const steady::Generator g = steady::assemble(fig1_with_fields(0.8, 0.5, 0.3));
    const DenseOperator bad = DenseOperator::Identity(8, 8);
    EXPECT_THROW(global_heat_current(bad, g.H, g.dissipators[0]), DomainError);
}

TEST(GlobalMe, MinimumBohrGap) {
    model::ModelParams p;
    p.B = {1, 2, 3};
    p.gamma = {1, 1, 1};
    const Spectrum s = compute_spectrum(model::build_hamiltonian(p));
    std::vector<JumpSet> sets;
    for (int site = 1; site <= 3; ++site) sets.push_back(jump_operators(s, site, default_degeneracy_tol(s)));
    EXPECT_NEAR(min_bohr_gap(sets), 2.0, 1e-12);  // frequencies ±2, ±4, ±6
}

TEST(GlobalMe, SecularValidityWarning) {
    model::ModelParams p = fig1_with_fields(0.8, 0.5, 0.3);
    EXPECT_TRUE(steady::assemble(p).warnings.empty());
    p.gamma = {1e-3, 1e-7, 1e-7};
    const auto w = steady::assemble(p).warnings;
    EXPECT_NE(std::find(w.begin(), w.end(), "secular_validity_gamma1"), w.end());
}
