// spin_algebra.hpp — Dense multi-qubit operators: Pauli embedding, partial trace,
// partial transpose, column-stacked vectorization and sandwich superoperators

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "trimachine/errors.hpp"

namespace trimachine::spin {

using cplx = std::complex<double>;

template <class Real>
using Op = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vec = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

// Square complex matrix; side length is a power of two for n-qubit operators.
using DenseOperator = Op<double>;
// Square complex matrix of side d² acting on column-stacked d×d operators.
using SuperOperator = Op<double>;
using VecOperator = Vec<double>;

enum class Axis { x, y, z, plus, minus };

// Convention: |0> is spin up (sigma_z = +1), |1> is spin down.
// sigma_plus = |0><1| raises, sigma_minus = |1><0| lowers.
inline DenseOperator pauli(Axis axis) {
    DenseOperator M = DenseOperator::Zero(2, 2);
    switch (axis) {
    case Axis::x: M(0, 1) = 1.0; M(1, 0) = 1.0; break;
    case Axis::y: M(0, 1) = cplx(0.0, -1.0); M(1, 0) = cplx(0.0, 1.0); break;
    case Axis::z: M(0, 0) = 1.0; M(1, 1) = -1.0; break;
    case Axis::plus: M(0, 1) = 1.0; break;
    case Axis::minus: M(1, 0) = 1.0; break;
    }
    return M;
}

inline std::size_t dim_of(int n_sites) { return std::size_t{1} << n_sites; }

inline void check_site(int site, int n_sites) {
    if (n_sites < 1 || n_sites > 16)
        throw DomainError("n_sites must be in [1, 16], got " + std::to_string(n_sites));
    if (site < 1 || site > n_sites)
        throw DomainError("site " + std::to_string(site) + " out of range [1, " +
                          std::to_string(n_sites) + "]");
}

inline void check_dim(const DenseOperator& rho, int n_sites, const char* what) {
    const auto d = static_cast<Eigen::Index>(dim_of(n_sites));
    if (rho.rows() != d || rho.cols() != d)
        throw DomainError(std::string(what) + ": operator is " + std::to_string(rho.rows()) +
                          "x" + std::to_string(rho.cols()) + ", expected " + std::to_string(d) +
                          "x" + std::to_string(d));
}

// I ⊗ … ⊗ op ⊗ … ⊗ I with op in tensor slot `site` (slot 1 = leftmost factor).
inline DenseOperator embed(const DenseOperator& op, int site, int n_sites) {
    check_site(site, n_sites);
    DenseOperator out = DenseOperator::Identity(1, 1);
    for (int s = 1; s <= n_sites; ++s) {
        const DenseOperator factor = (s == site) ? op : DenseOperator::Identity(2, 2);
        DenseOperator next = Eigen::kroneckerProduct(out, factor).eval();
        out = std::move(next);
    }
    return out;
}

inline DenseOperator embed_pauli(int site, Axis axis, int n_sites) {
    return embed(pauli(axis), site, n_sites);
}

// Bit of basis index `k` belonging to tensor slot `site` (slot 1 = most significant).
inline std::size_t slot_bit(std::size_t k, int site, int n_sites) {
    return (k >> (n_sites - site)) & 1u;
}

inline DenseOperator partial_trace(const DenseOperator& rho, std::vector<int> keep, int n_sites) {
    check_dim(rho, n_sites, "partial_trace");
    if (keep.empty()) throw DomainError("partial_trace: keep set is empty");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw DomainError("partial_trace: duplicate site in keep set");
    for (int s : keep) check_site(s, n_sites);

    std::vector<int> traced;
    for (int s = 1; s <= n_sites; ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);

    const auto nk = static_cast<int>(keep.size());
    const auto nt = static_cast<int>(traced.size());
    const std::size_t dk = dim_of(nk);
    const std::size_t dt = dim_of(nt);

    // Full index from (kept index, traced index), slots in ascending order.
    auto compose = [&](std::size_t ik, std::size_t it) {
        std::size_t full = 0;
        for (int m = 0; m < nk; ++m)
            full |= ((ik >> (nk - 1 - m)) & 1u) << (n_sites - keep[m]);
        for (int m = 0; m < nt; ++m)
            full |= ((it >> (nt - 1 - m)) & 1u) << (n_sites - traced[m]);
        return static_cast<Eigen::Index>(full);
    };

    DenseOperator out = DenseOperator::Zero(dk, dk);
    for (std::size_t a = 0; a < dk; ++a)
        for (std::size_t b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < dt; ++t) acc += rho(compose(a, t), compose(b, t));
            out(a, b) = acc;
        }
    return out;
}

// Transposes tensor slot `site` only; an involution.
inline DenseOperator partial_transpose(const DenseOperator& rho, int site, int n_sites) {
    check_site(site, n_sites);
    check_dim(rho, n_sites, "partial_transpose");
    const std::size_t d = dim_of(n_sites);
    const std::size_t mask = std::size_t{1} << (n_sites - site);
    DenseOperator out(rho.rows(), rho.cols());
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            // swap the `site` bit between row and column index
            const std::size_t rb = r & mask, cb = c & mask;
            const std::size_t r2 = (r & ~mask) | cb;
            const std::size_t c2 = (c & ~mask) | rb;
            out(r2, c2) = rho(r, c);
        }
    return out;
}

// Column stacking: vec(rho)[r + c*d] = rho(r, c).
template <class Real>
Vec<Real> vectorize(const Op<Real>& rho) {
    return Eigen::Map<const Vec<Real>>(rho.data(), rho.size());
}

template <class Real>
Op<Real> unvectorize(const Vec<Real>& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw DomainError("unvectorize: length is not a perfect square");
    return Eigen::Map<const Op<Real>>(v.data(), d, d);
}

// Matrix of rho -> A rho B under column stacking: B^T ⊗ A.
template <class Real>
Op<Real> sandwich_superop(const Op<Real>& A, const Op<Real>& B) {
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw DomainError("sandwich_superop: operands must be square and of equal dimension");
    return Eigen::kroneckerProduct(B.transpose(), A).eval();
}

// -i[H, ·]
template <class Real>
Op<Real> commutator_superop(const Op<Real>& H) {
    const Op<Real> I = Op<Real>::Identity(H.rows(), H.cols());
    return std::complex<Real>(0, -1) * (sandwich_superop(H, I) - sandwich_superop(I, H));
}

// D[X] rho = X rho X† − ½{X†X, rho}
template <class Real>
Op<Real> lindblad_superop(const Op<Real>& X) {
    const Op<Real> I = Op<Real>::Identity(X.rows(), X.cols());
    const Op<Real> Xd = X.adjoint();
    const Op<Real> XdX = Xd * X;
    return sandwich_superop(X, Xd) - Real(0.5) * sandwich_superop(XdX, I) -
           Real(0.5) * sandwich_superop(I, XdX);
}

// L += c·D[X], touching only the nonzero entries of X; equals c·lindblad_superop(X).
template <class Real>
void accumulate_lindblad(Op<Real>& L, const Op<Real>& X, Real c) {
    const auto d = X.rows();
    if (X.cols() != d || L.rows() != d * d || L.cols() != d * d)
        throw DomainError("accumulate_lindblad: dimension mismatch");
    struct Entry { Eigen::Index r, c; std::complex<Real> v; };
    std::vector<Entry> nz;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            if (X(i, j) != std::complex<Real>(0)) nz.push_back({i, j, X(i, j)});
    // conj(X) ⊗ X
    for (const Entry& a : nz)
        for (const Entry& b : nz)
            L(a.r * d + b.r, a.c * d + b.c) += c * std::conj(a.v) * b.v;
    const Op<Real> XdX = X.adjoint() * X;
    const Real h = c / Real(2);
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                if (XdX(i, j) == std::complex<Real>(0)) continue;
                L(k * d + i, k * d + j) -= h * XdX(i, j);   // I ⊗ X†X
                L(j * d + k, i * d + k) -= h * XdX(i, j);   // (X†X)ᵀ ⊗ I
            }
}

template <class Real>
Op<Real> apply(const Op<Real>& L, const Op<Real>& rho) {
    if (L.rows() != rho.size() || L.cols() != rho.size())
        throw DomainError("apply: superoperator/operator dimension mismatch");
    return unvectorize<Real>(L * vectorize(rho));
}

template <class Real>
double hermiticity_residual(const Op<Real>& A) {
    return static_cast<double>((A - A.adjoint()).norm());
}

template <class Real>
Op<Real> hermitize(const Op<Real>& A) {
    return Real(0.5) * (A + A.adjoint());
}

// Re Tr(obs·rho); refuses results with a significant imaginary part.
template <class Real>
Real expectation(const Op<Real>& rho, const Op<Real>& obs) {
    if (rho.rows() != obs.rows() || rho.cols() != obs.cols() || rho.rows() != rho.cols())
        throw DomainError("expectation: dimension mismatch");
    // Tr(obs·rho) = sum_ab obs_ab rho_ba
    const std::complex<Real> value = obs.cwiseProduct(rho.transpose()).sum();
    if (std::abs(value.imag()) > Real(1e-10) * obs.norm() * rho.norm())
        throw NumericalError("expectation: imaginary residue " +
                             std::to_string(static_cast<double>(value.imag())) +
                             " exceeds tolerance");
    return value.real();
}

inline Eigen::VectorXd hermitian_eigenvalues(const DenseOperator& A) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(hermitize(A), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Trace distance ½‖A − B‖₁ for Hermitian arguments.
inline double trace_distance(const DenseOperator& A, const DenseOperator& B) {
    return 0.5 * hermitian_eigenvalues(A - B).cwiseAbs().sum();
}

// Induced 1-norm (maximum absolute column sum); used as ‖𝓛‖ throughout.
template <class Real>
double one_norm(const Op<Real>& M) {
    return static_cast<double>(M.cwiseAbs().colwise().sum().maxCoeff());
}

} // namespace trimachine::spin
