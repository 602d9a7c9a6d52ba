// global_me.hpp — Harmonic-bath (global, secular) master equation: spectral
// decomposition of H_S, global jump operators, GKLS dissipators, heat currents

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimachine/errors.hpp"
#include "trimachine/model.hpp"
#include "trimachine/spin_algebra.hpp"

namespace trimachine::global_me {

using spin::DenseOperator;
using spin::SuperOperator;

struct Spectrum {
    int n_sites{model::kSites};
    Eigen::VectorXd energies;          // ascending
    Eigen::MatrixXcd eigenvectors;     // columns, computational basis
    std::vector<int> sector_labels;    // total magnetization of each eigenvector
};

// Diagonalizes H sector by sector in total magnetization. H must conserve it.
inline Spectrum compute_spectrum(const DenseOperator& H, int n_sites = model::kSites) {
    spin::check_dim(H, n_sites, "compute_spectrum");
    const auto d = static_cast<Eigen::Index>(spin::dim_of(n_sites));

    std::vector<int> mag(d);
    for (Eigen::Index k = 0; k < d; ++k) mag[k] = model::basis_magnetization(k, n_sites);
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            if (mag[r] != mag[c] && std::abs(H(r, c)) > 1e-12 * std::max(1.0, H.norm()))
                throw DomainError("compute_spectrum: Hamiltonian does not conserve magnetization");

    std::vector<double> energies;
    std::vector<Eigen::VectorXcd> vectors;
    std::vector<int> labels;
    for (int m = -n_sites; m <= n_sites; m += 2) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index k = 0; k < d; ++k)
            if (mag[k] == m) idx.push_back(k);
        if (idx.empty()) continue;
        const auto n = static_cast<Eigen::Index>(idx.size());
        DenseOperator block(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) block(a, b) = H(idx[a], idx[b]);
        Eigen::SelfAdjointEigenSolver<DenseOperator> es(spin::hermitize(block));
        for (Eigen::Index e = 0; e < n; ++e) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
            for (Eigen::Index a = 0; a < n; ++a) v(idx[a]) = es.eigenvectors()(a, e);
            energies.push_back(es.eigenvalues()(e));
            vectors.push_back(std::move(v));
            labels.push_back(m);
        }
    }

    std::vector<std::size_t> order(energies.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });

    Spectrum s;
    s.n_sites = n_sites;
    s.energies.resize(d);
    s.eigenvectors.resize(d, d);
    s.sector_labels.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        s.energies(k) = energies[order[k]];
        s.eigenvectors.col(k) = vectors[order[k]];
        s.sector_labels[k] = labels[order[k]];
    }
    return s;
}

// Default clustering tolerance for Bohr frequencies.
inline double default_degeneracy_tol(const Spectrum& s) {
    return 1e-9 * std::max(1.0, s.energies.cwiseAbs().maxCoeff());
}

struct Jump {
    double omega;             // Bohr frequency, > 0
    DenseOperator A;          // lowers the energy by omega; A_{-omega} = A†
    DenseOperator A_energy;   // the same operator in the eigenbasis of H
};

struct JumpSet {
    int site{1};
    std::vector<Jump> jumps;          // ascending omega
    DenseOperator discarded;          // |omega| <= tol component of sigma_x
    double degeneracy_tol{0.0};
};

// Fourier components of sigma_x^site in the Heisenberg picture of H.
inline JumpSet jump_operators(const Spectrum& spec, int site, double degeneracy_tol) {
    spin::check_site(site, spec.n_sites);
    if (!(degeneracy_tol > 0.0)) throw DomainError("jump_operators: degeneracy_tol must be > 0");

    const Eigen::MatrixXcd& V = spec.eigenvectors;
    const auto d = V.rows();
    const DenseOperator X = V.adjoint() * spin::embed_pauli(site, spin::Axis::x, spec.n_sites) * V;

    struct Element { double omega; Eigen::Index a, b; };
    std::vector<Element> positive;
    DenseOperator zero_part = DenseOperator::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            if (std::abs(X(a, b)) <= 1e-15) continue;
            const double omega = spec.energies(b) - spec.energies(a);
            if (std::abs(omega) <= degeneracy_tol)
                zero_part(a, b) = X(a, b);
            else if (omega > 0.0)
                positive.push_back({omega, a, b});
        }
    std::sort(positive.begin(), positive.end(),
              [](const Element& l, const Element& r) { return l.omega < r.omega; });

    JumpSet out;
    out.site = site;
    out.degeneracy_tol = degeneracy_tol;
    out.discarded = V * zero_part * V.adjoint();

    std::size_t start = 0;
    while (start < positive.size()) {
        std::size_t stop = start + 1;
        while (stop < positive.size() &&
               positive[stop].omega - positive[stop - 1].omega <= degeneracy_tol)
            ++stop;
        const double lo = positive[start].omega, hi = positive[stop - 1].omega;
        if (hi - lo > 10.0 * degeneracy_tol)
            throw ClusteringError("jump_operators: Bohr frequency cluster near " +
                                  std::to_string(lo) + " spans " + std::to_string(hi - lo) +
                                  " (> 10x tolerance); tighten or separate the parameters");
        DenseOperator A = DenseOperator::Zero(d, d);
        double sum = 0.0;
        for (std::size_t k = start; k < stop; ++k) {
            A(positive[k].a, positive[k].b) = X(positive[k].a, positive[k].b);
            sum += positive[k].omega;
        }
        out.jumps.push_back({sum / static_cast<double>(stop - start), V * A * V.adjoint(), A});
        start = stop;
    }
    return out;
}

// Bose-Einstein occupation 1/(exp(omega/T) − 1).
template <class Real>
Real bose_occupation(Real omega, Real T) {
    if (!(omega > 0)) throw DomainError("bose_occupation: omega must be > 0");
    if (!(T > 0)) throw DomainError("bose_occupation: T must be > 0");
    return Real(1) / std::expm1(omega / T);
}

namespace detail {

template <class Real>
spin::Op<Real> assemble_dissipator(const JumpSet& jumps, double gamma, double T, bool energy_basis) {
    const auto d = jumps.discarded.rows();
    spin::Op<Real> L = spin::Op<Real>::Zero(d * d, d * d);
    const Real g = gamma;
    for (const Jump& j : jumps.jumps) {
        const Real n = bose_occupation<Real>(j.omega, T);
        const spin::Op<Real> A = (energy_basis ? j.A_energy : j.A).template cast<std::complex<Real>>();
        const spin::Op<Real> Ad = A.adjoint();
        spin::accumulate_lindblad<Real>(L, A, g * (Real(1) + n));
        spin::accumulate_lindblad<Real>(L, Ad, g * n);
    }
    return L;
}

} // namespace detail

// sum_{omega>0} gamma (1+n) D[A] + gamma n D[A†], computational basis.
inline SuperOperator global_dissipator(const JumpSet& jumps, double gamma, double T) {
    return detail::assemble_dissipator<double>(jumps, gamma, T, false);
}

// Same generator expressed in the eigenbasis of H, at precision Real.
template <class Real>
spin::Op<Real> global_dissipator_energy_basis(const JumpSet& jumps, double gamma, double T) {
    return detail::assemble_dissipator<Real>(jumps, gamma, T, true);
}

// Smallest separation between distinct Bohr frequencies (both signs) of all jump sets.
inline double min_bohr_gap(const std::vector<JumpSet>& sets) {
    std::vector<double> w;
    for (const auto& s : sets)
        for (const auto& j : s.jumps) {
            w.push_back(j.omega);
            w.push_back(-j.omega);
        }
    std::sort(w.begin(), w.end());
    double tol = 0.0;
    for (const auto& s : sets) tol = std::max(tol, s.degeneracy_tol);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < w.size(); ++k)
        if (w[k] - w[k - 1] > tol) gap = std::min(gap, w[k] - w[k - 1]);
    return gap;
}

template <class Real>
void check_state(const spin::Op<Real>& rho, const char* what) {
    if (std::abs(rho.trace() - Real(1)) > Real(1e-10) || spin::hermiticity_residual(rho) > 1e-10)
        throw DomainError(std::string(what) + ": state is not a normalized Hermitian operator");
}

// Q_i = Tr{H_S L_i[rho]}; any basis, as long as all three arguments share it.
template <class Real>
Real global_heat_current(const spin::Op<Real>& rho_ss, const spin::Op<Real>& H,
                         const spin::Op<Real>& dissipator_i) {
    check_state(rho_ss, "global_heat_current");
    return spin::expectation(spin::hermitize<Real>(spin::apply(dissipator_i, rho_ss)), H);
}

inline double entropy_production(const std::array<double, 3>& Q, const std::array<double, 3>& T) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (!(T[i] > 0.0)) throw DomainError("entropy_production: temperatures must be > 0");
        s -= Q[i] / T[i];
    }
    return s;
}

} // namespace trimachine::global_me
