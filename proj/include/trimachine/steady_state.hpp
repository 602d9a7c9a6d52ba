// steady_state.hpp — Full Liouvillian assembly for either bath model, null-space
// steady-state solver, and an independent RK4 time-evolution oracle

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "trimachine/errors.hpp"
#include "trimachine/global_me.hpp"
#include "trimachine/local_me.hpp"
#include "trimachine/model.hpp"
#include "trimachine/spin_algebra.hpp"

namespace trimachine::steady {

using model::BathModel;
using model::ModelParams;
using spin::DenseOperator;
using spin::SuperOperator;
using spin::VecOperator;

struct Generator {
    ModelParams params;
    DenseOperator H;
    SuperOperator coherent;                       // -i[H, ·]
    std::array<SuperOperator, 3> dissipators;     // L_i (harmonic) or D_i (repeated interaction)
    SuperOperator total;
    std::vector<global_me::JumpSet> jump_sets;    // harmonic model only
    std::vector<std::string> warnings;

    // Harmonic model only: the same generator in the eigenbasis of H at extended
    // precision. There the coherent part is exactly diagonal, so Tr{H [H, rho]}
    // vanishes identically and heat-current balances are not limited by roundoff.
    std::optional<global_me::Spectrum> spectrum;
    spin::Op<long double> energy_coherent;
    std::array<spin::Op<long double>, 3> energy_dissipators;
    spin::Op<long double> energy_total;
};

// ‖vec(I)† L‖₁ relative to ‖L‖₁; zero for trace-preserving generators.
template <class Real>
double trace_preservation_residual(const spin::Op<Real>& L) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(L.rows()))));
    Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic> row =
        Eigen::Matrix<std::complex<Real>, 1, Eigen::Dynamic>::Zero(L.cols());
    for (Eigen::Index k = 0; k < d; ++k) row += L.row(k * (d + 1));
    return static_cast<double>(row.cwiseAbs().sum()) /
           std::max(spin::one_norm(L), std::numeric_limits<double>::min());
}

// `allow_zero_rates` admits gamma = 0 (closed-system diagnostics).
inline Generator assemble(const ModelParams& p, bool allow_zero_rates = false) {
    model::validate(p, allow_zero_rates);
    Generator g;
    g.params = p;
    g.H = model::build_hamiltonian(p);
    g.coherent = spin::commutator_superop(g.H);
    g.total = g.coherent;

    if (p.bath_model == BathModel::harmonic) {
        g.spectrum = global_me::compute_spectrum(g.H);
        const global_me::Spectrum& spec = *g.spectrum;
        const double tol = global_me::default_degeneracy_tol(spec);
        spin::Op<long double> E = spin::Op<long double>::Zero(8, 8);
        for (int k = 0; k < 8; ++k) E(k, k) = spec.energies(k);
        g.energy_coherent = spin::commutator_superop(E);
        g.energy_total = g.energy_coherent;
        for (int s = 1; s <= model::kSites; ++s) {
            g.jump_sets.push_back(global_me::jump_operators(spec, s, tol));
            const auto& js = g.jump_sets.back();
            if (js.discarded.norm() > 1e-10)
                g.warnings.push_back("zero_frequency_part_discarded_site" + std::to_string(s));
            g.dissipators[s - 1] = global_me::global_dissipator(js, p.gamma[s - 1], p.T[s - 1]);
            g.energy_dissipators[s - 1] =
                global_me::global_dissipator_energy_basis<long double>(js, p.gamma[s - 1], p.T[s - 1]);
            g.energy_total += g.energy_dissipators[s - 1];
        }
        const double gap = global_me::min_bohr_gap(g.jump_sets);
        for (int s = 0; s < 3; ++s)
            if (p.gamma[s] >= 0.1 * gap) {
                g.warnings.push_back("secular_validity_gamma" + std::to_string(s + 1));
            }
    } else {
        for (int s = 1; s <= model::kSites; ++s)
            g.dissipators[s - 1] = local_me::local_dissipator(p, s);
    }
    for (const auto& D : g.dissipators) g.total += D;

    if (trace_preservation_residual(g.total) > 1e-12)
        throw NumericalError("assemble: generator is not trace preserving");
    return g;
}

inline SuperOperator build_liouvillian(const ModelParams& p) { return assemble(p).total; }

enum class Method { nullspace, evolution };

template <class Real>
struct SteadyStateResultT {
    spin::Op<Real> rho;
    double residual{0.0};     // ‖L vec(rho)‖₂
    int nullspace_dim{0};
    Method method{Method::nullspace};
};

using SteadyStateResult = SteadyStateResultT<double>;

namespace detail {

template <class Real>
spin::Vec<Real> residual_extended(const spin::Op<Real>& M, const spin::Vec<Real>& x,
                                  const spin::Vec<Real>& b) {
    using Wide = std::complex<long double>;
    const Eigen::Matrix<Wide, Eigen::Dynamic, 1> r =
        b.template cast<Wide>() - M.template cast<Wide>() * x.template cast<Wide>();
    return r.template cast<std::complex<Real>>();
}

inline void check_physical(const DenseOperator& rho, const char* what) {
    if (std::abs(rho.trace() - 1.0) > 1e-12)
        throw NumericalError(std::string(what) + ": trace deviates from 1");
    if (spin::hermiticity_residual(rho) > 1e-10)
        throw NumericalError(std::string(what) + ": state not Hermitian");
    const double min_eig = spin::hermitian_eigenvalues(rho).minCoeff();
    if (min_eig < -1e-10)
        throw NumericalError(std::string(what) + ": negative eigenvalue " + std::to_string(min_eig));
}

template <class Real>
spin::Op<Real> normalize_state(const spin::Op<Real>& rho) {
    spin::Op<Real> h = spin::hermitize<Real>(rho);
    const Real tr = h.trace().real();
    return h / tr;
}

} // namespace detail

// Unique fixed point of L: smallest right singular vector, then refined against the
// trace-constrained linear system with extended-precision residuals.
template <class Real>
SteadyStateResultT<Real> solve_steady_state_t(const spin::Op<Real>& L) {
    const auto n = L.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (L.cols() != n || d * d != n) throw DomainError("solve_steady_state: bad generator shape");
    if (trace_preservation_residual(L) > 1e-12)
        throw DomainError("solve_steady_state: generator is not trace preserving");

    const Eigen::MatrixXcd Ld = L.template cast<std::complex<double>>();
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(Ld, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double threshold = 1e-12 * sv(0);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) <= threshold) ++null_dim;
    if (null_dim != 1)
        throw DegenerateSteadyStateError(
            "solve_steady_state: numerical null space has dimension " + std::to_string(null_dim),
            null_dim);

    const Eigen::VectorXcd v = svd.matrixV().col(n - 1);
    spin::Op<Real> rho = detail::normalize_state<Real>(
        spin::unvectorize<double>(v).template cast<std::complex<Real>>());

    // Replace the first population equation by the trace condition; the dropped row is
    // a combination of the other population rows, so the system is nonsingular.
    spin::Op<Real> M = L;
    M.row(0).setZero();
    for (Eigen::Index k = 0; k < d; ++k) M(0, k * (d + 1)) = Real(1);
    spin::Vec<Real> rhs = spin::Vec<Real>::Zero(n);
    rhs(0) = Real(1);
    const Eigen::PartialPivLU<spin::Op<Real>> lu(M);
    spin::Vec<Real> x = spin::vectorize(rho);
    for (int it = 0; it < 4; ++it) {
        const spin::Vec<Real> dx = lu.solve(detail::residual_extended<Real>(M, x, rhs));
        x += dx;
        if (dx.norm() <= Real(1e-17) * x.norm()) break;
    }
    rho = detail::normalize_state<Real>(spin::unvectorize<Real>(x));

    SteadyStateResultT<Real> out;
    out.rho = rho;
    out.residual = static_cast<double>((L * spin::vectorize(rho)).norm());
    out.nullspace_dim = null_dim;
    out.method = Method::nullspace;
    if (out.residual > 1e-10 * spin::one_norm(L))
        throw NumericalError("solve_steady_state: residual " + std::to_string(out.residual) +
                             " above tolerance");
    detail::check_physical(rho.template cast<std::complex<double>>(), "solve_steady_state");
    return out;
}

inline SteadyStateResult solve_steady_state(const SuperOperator& L) {
    return solve_steady_state_t<double>(L);
}

// Steady state of an assembled generator. The harmonic model is solved in the
// energy eigenbasis at extended precision and rotated back.
struct Solution {
    SteadyStateResult state;              // computational basis
    spin::Op<long double> rho_energy;     // harmonic model only
};

inline Solution solve(const Generator& g) {
    Solution out;
    if (!g.spectrum) {
        out.state = solve_steady_state(g.total);
        return out;
    }
    const auto e = solve_steady_state_t<long double>(g.energy_total);
    out.rho_energy = e.rho;
    const Eigen::MatrixXcd& V = g.spectrum->eigenvectors;
    const DenseOperator rho_e = e.rho.cast<std::complex<double>>();
    const DenseOperator rho = spin::hermitize<double>(V * rho_e * V.adjoint());
    out.state.rho = rho / rho.trace().real();
    out.state.residual = (g.total * spin::vectorize(out.state.rho)).norm();
    out.state.nullspace_dim = e.nullspace_dim;
    out.state.method = Method::nullspace;
    if (out.state.residual > 1e-10 * spin::one_norm(g.total))
        throw NumericalError("solve: rotated state fails the residual check");
    detail::check_physical(out.state.rho, "solve");
    return out;
}

// Slowest nonzero relaxation rate min |Re λ| over eigenvalues with |λ| above the null cutoff.
inline double relaxation_gap(const SuperOperator& L) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L, false);
    const double cutoff = 1e-10 * spin::one_norm(L);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const auto lam = es.eigenvalues()(k);
        if (std::abs(lam) > cutoff) gap = std::min(gap, std::abs(lam.real()));
    }
    return gap;
}

namespace detail {

// (I + A)(I + B) − I, kept in increment form so that tiny dissipative
// contributions are not rounded away against the identity.
inline Eigen::MatrixXcd compose_increments(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    return A + B + A * B;
}

// Increment of one classical RK4 step for the linear system x' = L x.
inline Eigen::MatrixXcd rk4_increment(const SuperOperator& L, double dt) {
    const Eigen::MatrixXcd hL = dt * L;
    const Eigen::MatrixXcd hL2 = hL * hL;
    const Eigen::MatrixXcd hL3 = hL2 * hL;
    return hL + hL2 / 2.0 + hL3 / 6.0 + hL3 * hL / 24.0;
}

} // namespace detail

inline void check_step(const SuperOperator& L, double dt) {
    if (!(dt > 0.0)) throw DomainError("evolve_oracle: dt must be > 0");
    if (dt * spin::one_norm(L) > 0.1)
        throw DomainError("evolve_oracle: dt*|L| = " + std::to_string(dt * spin::one_norm(L)) +
                          " exceeds 0.1");
}

// Plain stepping of vec(rho)' = L vec(rho) with classical RK4.
inline DenseOperator evolve_stepwise(const SuperOperator& L, const DenseOperator& rho0, int steps,
                                     double dt) {
    check_step(L, dt);
    VecOperator x = spin::vectorize(rho0);
    for (int s = 0; s < steps; ++s) {
        const VecOperator k1 = L * x;
        const VecOperator k2 = L * (x + 0.5 * dt * k1);
        const VecOperator k3 = L * (x + 0.5 * dt * k2);
        const VecOperator k4 = L * (x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return spin::unvectorize(x);
}

// RK4 integration to t_final. The step count is rounded up so that the actual
// step never exceeds `dt`; the N-step propagator is formed by binary powering of
// the single-step map, which equals N sequential RK4 steps.
inline DenseOperator evolve_oracle(const SuperOperator& L, const DenseOperator& rho0, double t_final,
                                   double dt) {
    check_step(L, dt);
    if (!(t_final >= 0.0)) throw DomainError("evolve_oracle: t_final must be >= 0");
    if (rho0.size() != L.cols()) throw DomainError("evolve_oracle: dimension mismatch");
    const double steps_real = std::ceil(t_final / dt);
    if (steps_real > 9.0e18) throw DomainError("evolve_oracle: too many steps");
    auto steps = static_cast<unsigned long long>(steps_real);
    if (steps == 0) return rho0;
    const double h = t_final / static_cast<double>(steps);

    Eigen::MatrixXcd base = detail::rk4_increment(L, h);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(L.rows(), L.cols());
    while (steps > 0) {
        if (steps & 1ull) acc = detail::compose_increments(acc, base);
        steps >>= 1;
        if (steps > 0) base = detail::compose_increments(base, base);
    }
    const VecOperator x0 = spin::vectorize(rho0);
    const DenseOperator rho = spin::unvectorize<double>(x0 + acc * x0);
    if (std::abs(rho.trace() - rho0.trace()) > 1e-9)
        throw NumericalError("evolve_oracle: trace drift above 1e-9");
    return rho;
}

// Long-time state from the maximally mixed start, with the default horizon of
// 50 relaxation times and dt = 0.05/‖L‖.
inline SteadyStateResult steady_state_by_evolution(const SuperOperator& L) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(L.rows()))));
    const double gap = relaxation_gap(L);
    if (!std::isfinite(gap) || gap <= 0.0)
        throw DegenerateSteadyStateError("steady_state_by_evolution: no relaxation gap", 2);
    const DenseOperator rho0 = DenseOperator::Identity(d, d) / static_cast<double>(d);
    SteadyStateResult out;
    out.rho = detail::normalize_state<double>(
        evolve_oracle(L, rho0, 50.0 / gap, 0.05 / spin::one_norm(L)));
    out.residual = (L * spin::vectorize(out.rho)).norm();
    out.nullspace_dim = 1;
    out.method = Method::evolution;
    return out;
}

// exp(−H/T)/Z built directly from the spectrum of H.
inline DenseOperator gibbs_state(const DenseOperator& H, double T) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(spin::hermitize(H));
    const Eigen::VectorXd& E = es.eigenvalues();
    const double emin = E.minCoeff();
    Eigen::VectorXd w = (-(E.array() - emin) / T).exp();
    w /= w.sum();
    const Eigen::VectorXcd wc = w.cast<std::complex<double>>();
    return es.eigenvectors() * wc.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace trimachine::steady
