// model.hpp — Physical parameters of the three-qubit machine and the XXZ Hamiltonian
//
// Units: hbar = k_B = 1. Fields, couplings, anisotropies and rates are angular
// frequencies; temperatures are energies.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "trimachine/errors.hpp"
#include "trimachine/spin_algebra.hpp"

namespace trimachine::model {

using spin::DenseOperator;

inline constexpr int kSites = 3;

enum class BathModel { harmonic, repeated_interaction };

inline std::string_view to_string(BathModel m) {
    return m == BathModel::harmonic ? "harmonic" : "repeated_interaction";
}

inline BathModel bath_model_from_string(std::string_view s) {
    if (s == "harmonic") return BathModel::harmonic;
    if (s == "repeated_interaction") return BathModel::repeated_interaction;
    throw ConfigError("unknown bath_model '" + std::string(s) +
                      "' (expected harmonic or repeated_interaction)");
}

// Pair slots are ordered (1,2), (1,3), (2,3).
inline constexpr std::array<std::pair<int, int>, 3> kPairs{{{1, 2}, {1, 3}, {2, 3}}};

inline int pair_slot(int i, int j) {
    if (i > j) std::swap(i, j);
    if (i == 1 && j == 2) return 0;
    if (i == 1 && j == 3) return 1;
    if (i == 2 && j == 3) return 2;
    throw DomainError("invalid qubit pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

struct ModelParams {
    std::array<double, 3> B{};      // local fields
    std::array<double, 3> J{};      // exchange, keyed by pair slot
    std::array<double, 3> Delta{};  // anisotropy, keyed by pair slot
    std::array<double, 3> T{1.0, 2.0, 3.0};
    std::array<double, 3> gamma{};
    BathModel bath_model{BathModel::repeated_interaction};

    double coupling(int i, int j) const { return J[pair_slot(i, j)]; }
    double anisotropy(int i, int j) const { return Delta[pair_slot(i, j)]; }
};

// Throws DomainError unless fields/couplings are >= 0 and temperatures/rates > 0.
// `allow_zero_rates` admits gamma = 0 for closed-system diagnostics only.
inline void validate(const ModelParams& p, bool allow_zero_rates = false) {
    auto finite = [](double x) { return std::isfinite(x); };
    for (int k = 0; k < 3; ++k) {
        const std::string idx = std::to_string(k + 1);
        if (!finite(p.B[k]) || p.B[k] < 0.0) throw DomainError("B" + idx + " must be >= 0");
        if (!finite(p.J[k]) || p.J[k] < 0.0) throw DomainError("J[" + idx + "] must be >= 0");
        if (!finite(p.Delta[k]) || p.Delta[k] < 0.0)
            throw DomainError("Delta[" + idx + "] must be >= 0");
        if (!finite(p.T[k]) || p.T[k] <= 0.0) throw DomainError("T" + idx + " must be > 0");
        if (!finite(p.gamma[k]) || p.gamma[k] < 0.0 ||
            (!allow_zero_rates && p.gamma[k] == 0.0))
            throw DomainError("gamma" + idx + " must be > 0");
    }
}

inline bool temperatures_ordered(const ModelParams& p) {
    return p.T[0] < p.T[1] && p.T[1] < p.T[2];
}

// H_L,i = B_i sigma_z^i
inline DenseOperator local_hamiltonian(const ModelParams& p, int site) {
    return p.B[site - 1] * spin::embed_pauli(site, spin::Axis::z, kSites);
}

// H_I = sum_{i<j} J_ij (XX + YY) + Delta_ij ZZ
inline DenseOperator interaction_hamiltonian(const ModelParams& p) {
    using spin::Axis;
    using spin::embed_pauli;
    DenseOperator H = DenseOperator::Zero(8, 8);
    for (auto [i, j] : kPairs) {
        const int k = pair_slot(i, j);
        H += p.J[k] * (embed_pauli(i, Axis::x, kSites) * embed_pauli(j, Axis::x, kSites) +
                       embed_pauli(i, Axis::y, kSites) * embed_pauli(j, Axis::y, kSites));
        H += p.Delta[k] * embed_pauli(i, Axis::z, kSites) * embed_pauli(j, Axis::z, kSites);
    }
    return H;
}

inline DenseOperator build_hamiltonian(const ModelParams& p) {
    validate(p, /*allow_zero_rates=*/true);
    DenseOperator H = interaction_hamiltonian(p);
    for (int s = 1; s <= kSites; ++s) H += local_hamiltonian(p, s);
    return H;
}

inline DenseOperator magnetization_operator(int n_sites = kSites) {
    const auto d = static_cast<Eigen::Index>(spin::dim_of(n_sites));
    DenseOperator M = DenseOperator::Zero(d, d);
    for (int s = 1; s <= n_sites; ++s) M += spin::embed_pauli(s, spin::Axis::z, n_sites);
    return M;
}

// ‖[H, sigma_z^total]‖_F
inline double check_conservation(const DenseOperator& H) {
    if (H.rows() != 8 || H.cols() != 8)
        throw DomainError("check_conservation: expected an 8x8 Hamiltonian");
    const DenseOperator M = magnetization_operator(kSites);
    return (H * M - M * H).norm();
}

// Total magnetization of computational basis state k (number of up spins minus down spins).
inline int basis_magnetization(std::size_t k, int n_sites) {
    int m = 0;
    for (int s = 1; s <= n_sites; ++s) m += spin::slot_bit(k, s, n_sites) ? -1 : 1;
    return m;
}

} // namespace trimachine::model
