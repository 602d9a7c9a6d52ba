// local_me.hpp — Repeated-interaction (local) master equation: local dissipators,
// heat currents against the local Hamiltonians, work power, magnetization currents

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "trimachine/errors.hpp"
#include "trimachine/global_me.hpp"
#include "trimachine/model.hpp"
#include "trimachine/spin_algebra.hpp"

namespace trimachine::local_me {

using model::ModelParams;
using spin::Axis;
using spin::DenseOperator;
using spin::SuperOperator;

struct LocalRates {
    int site;
    double n_up;   // Bose occupation at 2 B_i
    double gamma;
};

inline LocalRates local_rates(const ModelParams& p, int site) {
    spin::check_site(site, model::kSites);
    const double B = p.B[site - 1];
    if (!(B > 0.0))
        throw DomainError("local model requires B" + std::to_string(site) +
                          " > 0 (occupation diverges at zero gap)");
    return {site, global_me::bose_occupation<double>(2.0 * B, p.T[site - 1]), p.gamma[site - 1]};
}

// gamma (n+1) D[sigma_-] + gamma n D[sigma_+] on qubit `site`.
inline SuperOperator local_dissipator(const ModelParams& p, int site) {
    const LocalRates r = local_rates(p, site);
    const DenseOperator lower = spin::embed_pauli(site, Axis::minus, model::kSites);
    const DenseOperator raise = spin::embed_pauli(site, Axis::plus, model::kSites);
    return r.gamma * (r.n_up + 1.0) * spin::lindblad_superop(lower) +
           r.gamma * r.n_up * spin::lindblad_superop(raise);
}

// Matrix of D_i directly applied to a state, without forming the superoperator.
inline DenseOperator apply_local_dissipator(const ModelParams& p, int site, const DenseOperator& rho) {
    const LocalRates r = local_rates(p, site);
    const DenseOperator lower = spin::embed_pauli(site, Axis::minus, model::kSites);
    const DenseOperator raise = spin::embed_pauli(site, Axis::plus, model::kSites);
    auto D = [&](const DenseOperator& X) -> DenseOperator {
        const DenseOperator XdX = X.adjoint() * X;
        return X * rho * X.adjoint() - 0.5 * (XdX * rho + rho * XdX);
    };
    return r.gamma * (r.n_up + 1.0) * D(lower) + r.gamma * r.n_up * D(raise);
}

// Q_i = Tr{H_L,i D_i[rho]}
inline double local_heat_current(const DenseOperator& rho_ss, const ModelParams& p, int site) {
    global_me::check_state(rho_ss, "local_heat_current");
    return spin::expectation(spin::hermitize<double>(apply_local_dissipator(p, site, rho_ss)),
                             model::local_hamiltonian(p, site));
}

// Absolute floor for comparisons of currents that vanish identically.
inline double current_floor(const ModelParams& p) {
    const double g = *std::max_element(p.gamma.begin(), p.gamma.end());
    const double b = *std::max_element(p.B.begin(), p.B.end());
    return 1e-13 * g * std::max(1.0, b);
}

struct WorkPower {
    double from_interaction;   // Tr{H_I sum_i D_i[rho]}
    double from_heat;          // −sum_i Q_i
};

inline WorkPower work_power_both(const DenseOperator& rho_ss, const ModelParams& p) {
    global_me::check_state(rho_ss, "work_power");
    DenseOperator total = DenseOperator::Zero(8, 8);
    double heat = 0.0;
    for (int s = 1; s <= model::kSites; ++s) {
        const DenseOperator Ds = spin::hermitize<double>(apply_local_dissipator(p, s, rho_ss));
        total += Ds;
        heat += spin::expectation(Ds, model::local_hamiltonian(p, s));
    }
    return {spin::expectation(total, model::interaction_hamiltonian(p)), -heat};
}

// Work power; negative means work is produced. Both routes must agree.
inline double work_power(const DenseOperator& rho_ss, const ModelParams& p) {
    const WorkPower w = work_power_both(rho_ss, p);
    double qmax = 0.0;
    for (int s = 1; s <= model::kSites; ++s)
        qmax = std::max(qmax, std::abs(local_heat_current(rho_ss, p, s)));
    const double scale = std::max({std::abs(w.from_interaction), qmax});
    if (std::abs(w.from_interaction - w.from_heat) > 1e-10 * scale + current_floor(p))
        throw NumericalError("work_power: interaction form " + std::to_string(w.from_interaction) +
                             " disagrees with -sum Q = " + std::to_string(w.from_heat));
    return w.from_interaction;
}

// q_i = Tr{sigma_z^i D_i[rho]}, checked against gamma(1+2n)(<sigma_z>_b − <sigma_z>_i).
inline double bath_magnetization_current(const DenseOperator& rho_ss, const ModelParams& p, int site) {
    global_me::check_state(rho_ss, "bath_magnetization_current");
    const DenseOperator sz = spin::embed_pauli(site, Axis::z, model::kSites);
    const double q = spin::expectation(spin::hermitize<double>(apply_local_dissipator(p, site, rho_ss)), sz);

    const LocalRates r = local_rates(p, site);
    const double rate = r.gamma * (1.0 + 2.0 * r.n_up);
    const double bath_sz = -1.0 / (1.0 + 2.0 * r.n_up);
    const double closed = rate * (bath_sz - spin::expectation(rho_ss, sz));
    if (std::abs(closed - q) > 1e-10 * std::max(1.0, rate))
        throw NumericalError("bath_magnetization_current: closed form mismatch at site " +
                             std::to_string(site));
    return q;
}

// C_{j,i} = 2 J_ji <sigma_x^j sigma_y^i − sigma_x^i sigma_y^j>, magnetization flowing j -> i.
inline double interqubit_current(const DenseOperator& rho_ss, const ModelParams& p, int from_site,
                                 int to_site) {
    if (from_site == to_site) throw DomainError("interqubit_current: sites must differ");
    spin::check_site(from_site, model::kSites);
    spin::check_site(to_site, model::kSites);
    // Evaluate for the canonical ordering and flip the sign, so C_{i,j} = −C_{j,i} exactly.
    const int lo = std::min(from_site, to_site), hi = std::max(from_site, to_site);
    const DenseOperator obs =
        spin::embed_pauli(hi, Axis::x, 3) * spin::embed_pauli(lo, Axis::y, 3) -
        spin::embed_pauli(lo, Axis::x, 3) * spin::embed_pauli(hi, Axis::y, 3);
    const double c_hi_lo = 2.0 * p.coupling(lo, hi) * spin::expectation(rho_ss, obs);
    return from_site == hi ? c_hi_lo : -c_hi_lo;
}

struct CurrentSet {
    std::array<double, 3> Q{};   // heat currents into the system
    double W{0.0};               // work power
    std::array<double, 3> q{};   // bath magnetization currents
    std::array<double, 3> C{};   // C_{2,1}, C_{3,1}, C_{3,2}

    // C_{j,i}, magnetization current from qubit j to qubit i.
    double current(int from, int to) const {
        if (from == to) throw DomainError("CurrentSet::current: sites must differ");
        const int slot = model::pair_slot(from, to);
        return from > to ? C[slot] : -C[slot];
    }
};

inline CurrentSet compute_currents(const DenseOperator& rho_ss, const ModelParams& p) {
    CurrentSet c;
    for (int s = 1; s <= model::kSites; ++s) {
        c.Q[s - 1] = local_heat_current(rho_ss, p, s);
        c.q[s - 1] = bath_magnetization_current(rho_ss, p, s);
    }
    c.W = work_power(rho_ss, p);
    c.C[0] = interqubit_current(rho_ss, p, 2, 1);
    c.C[1] = interqubit_current(rho_ss, p, 3, 1);
    c.C[2] = interqubit_current(rho_ss, p, 3, 2);
    return c;
}

// q_i + sum_{j≠i} C_{j,i}; vanishes at steady state.
inline std::array<double, 3> continuity_residuals(const CurrentSet& c) {
    std::array<double, 3> r{};
    for (int i = 1; i <= 3; ++i) {
        r[i - 1] = c.q[i - 1];
        for (int j = 1; j <= 3; ++j)
            if (j != i) r[i - 1] += c.current(j, i);
    }
    return r;
}

} // namespace trimachine::local_me
