// correlations.hpp — Von Neumann entropies, pairwise mutual information, X-state
// structure of two-qubit reductions, MI lower bound and partial-transpose flags

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trimachine/errors.hpp"
#include "trimachine/local_me.hpp"
#include "trimachine/model.hpp"
#include "trimachine/spin_algebra.hpp"

namespace trimachine::correlations {

using spin::DenseOperator;

// −Tr ρ ln ρ in nats, 0·ln 0 := 0.
inline double von_neumann_entropy(const DenseOperator& rho) {
    const Eigen::VectorXd ev = spin::hermitian_eigenvalues(rho);
    double s = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        const double l = ev(k);
        if (l < -1e-10)
            throw DomainError("von_neumann_entropy: eigenvalue " + std::to_string(l) + " below -1e-10");
        if (l > 0.0) s -= l * std::log(l);
    }
    return s;
}

inline double mutual_information(const DenseOperator& rho, int i, int j) {
    if (i == j) throw DomainError("mutual_information: sites must differ");
    spin::check_dim(rho, model::kSites, "mutual_information");
    const double si = von_neumann_entropy(spin::partial_trace(rho, {i}, model::kSites));
    const double sj = von_neumann_entropy(spin::partial_trace(rho, {j}, model::kSites));
    const double sij = von_neumann_entropy(spin::partial_trace(rho, {i, j}, model::kSites));
    return si + sj - sij;
}

struct XStateAnalysis {
    double residual{0.0};                // Frobenius norm outside {diagonal, (1,2), (2,1)}
    std::array<double, 4> eigenvalues{}; // closed forms, in the order λ1..λ4
    double r23_modulus{0.0};
};

// 0-based indices: the pattern keeps the diagonal and the (1,2)/(2,1) pair;
// the (0,3)/(3,0) corners count toward the residual.
inline XStateAnalysis x_state_analysis(const DenseOperator& rho_pair) {
    if (rho_pair.rows() != 4 || rho_pair.cols() != 4)
        throw DomainError("x_state_analysis: expected a 4x4 operator");
    if (spin::hermiticity_residual(rho_pair) > 1e-10)
        throw DomainError("x_state_analysis: operator is not Hermitian");
    XStateAnalysis x;
    double off = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const bool kept = r == c || (r == 1 && c == 2) || (r == 2 && c == 1);
            if (!kept) off += std::norm(rho_pair(r, c));
        }
    x.residual = std::sqrt(off);
    const double r11 = rho_pair(0, 0).real(), r22 = rho_pair(1, 1).real();
    const double r33 = rho_pair(2, 2).real(), r44 = rho_pair(3, 3).real();
    x.r23_modulus = std::abs(rho_pair(1, 2));
    const double root = std::sqrt((r22 - r33) * (r22 - r33) + 4.0 * x.r23_modulus * x.r23_modulus);
    x.eigenvalues = {r11, 0.5 * (r22 + r33 + root), 0.5 * (r22 + r33 - root), r44};
    return x;
}

// ¼ Σ± ξ± ln ξ±, ξ± = 1 ± |C|/(2J).
inline double mi_lower_bound(double C, double J) {
    if (!(J > 0.0)) throw DomainError("mi_lower_bound: J must be > 0");
    const double a = std::abs(C) / (2.0 * J);
    if (a > 1.0) throw DomainError("mi_lower_bound: |C| exceeds 2J");
    auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
    return 0.25 * (xlogx(1.0 + a) + xlogx(1.0 - a));
}

struct PptResult {
    bool is_negative{false};
    double min_eigenvalue{0.0};
};

inline PptResult ppt_check(const DenseOperator& rho, int site) {
    const DenseOperator pt = spin::partial_transpose(rho, site, model::kSites);
    const double m = spin::hermitian_eigenvalues(pt).minCoeff();
    return {m < -1e-10, m};
}

struct CorrelationReport {
    std::array<double, 3> I{};                         // keyed by pair slot
    std::array<double, 3> x_form_residual{};
    std::array<double, 3> x_eigen_mismatch{};          // closed form vs direct, max abs
    std::array<std::optional<double>, 3> mi_bound{};   // absent for J = 0 or |C| > 2J
    std::array<bool, 3> ppt_negative{};                // per site
    std::array<double, 3> ppt_min_eigenvalue{};
};

inline CorrelationReport analyze(const DenseOperator& rho, const model::ModelParams& p,
                                 const local_me::CurrentSet& currents) {
    CorrelationReport out;
    for (auto [i, j] : model::kPairs) {
        const int k = model::pair_slot(i, j);
        out.I[k] = mutual_information(rho, i, j);
        const DenseOperator pair = spin::partial_trace(rho, {i, j}, model::kSites);
        const XStateAnalysis x = x_state_analysis(pair);
        out.x_form_residual[k] = x.residual;
        Eigen::VectorXd direct = spin::hermitian_eigenvalues(pair);
        std::array<double, 4> closed = x.eigenvalues;
        std::sort(closed.begin(), closed.end());
        double mismatch = 0.0;
        for (int m = 0; m < 4; ++m) mismatch = std::max(mismatch, std::abs(closed[m] - direct(m)));
        out.x_eigen_mismatch[k] = mismatch;
        const double J = p.J[k], C = currents.C[k];
        if (J > 0.0 && std::abs(C) <= 2.0 * J) out.mi_bound[k] = mi_lower_bound(C, J);
    }
    for (int s = 1; s <= 3; ++s) {
        const PptResult r = ppt_check(rho, s);
        out.ppt_negative[s - 1] = r.is_negative;
        out.ppt_min_eigenvalue[s - 1] = r.min_eigenvalue;
    }
    return out;
}

} // namespace trimachine::correlations
