// thermo.hpp — Operating-regime classification, COP metrics, regime-boundary lines,
// submachine decomposition, Otto field conditions and the full steady-state report

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trimachine/errors.hpp"
#include "trimachine/global_me.hpp"
#include "trimachine/local_me.hpp"
#include "trimachine/model.hpp"
#include "trimachine/steady_state.hpp"

namespace trimachine::thermo {

using local_me::CurrentSet;
using model::BathModel;
using model::ModelParams;

inline constexpr double kDefaultEpsilon = 1e-6;

enum class Regime { I, II, III, IV, V, VI, VII, VIII, IX, X, Unclassified };

inline std::string_view to_string(Regime r) {
    static constexpr std::array<std::string_view, 11> names{
        "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "Unclassified"};
    return names[static_cast<int>(r)];
}

inline Regime regime_from_string(std::string_view s) {
    for (int k = 0; k <= static_cast<int>(Regime::Unclassified); ++k)
        if (to_string(static_cast<Regime>(k)) == s) return static_cast<Regime>(k);
    throw ConfigError("unknown regime label '" + std::string(s) + "'");
}

// Sign table of heat currents (Q1, Q2, Q3) and work power. A |W| inside the
// epsilon band counts as W <= 0; a Q inside it leaves the point unclassified.
inline Regime classify_regime(const std::array<double, 3>& Q, double W,
                              double epsilon = kDefaultEpsilon) {
    if (!(epsilon > 0.0)) throw DomainError("classify_regime: epsilon must be > 0");
    const double scale = std::max({std::abs(Q[0]), std::abs(Q[1]), std::abs(Q[2]), std::abs(W)});
    const double band = epsilon * scale;
    if (scale == 0.0) return Regime::Unclassified;
    const bool all_pos = Q[0] > band && Q[1] > band && Q[2] > band;
    const bool all_neg = Q[0] < -band && Q[1] < -band && Q[2] < -band;
    if (all_pos || all_neg)
        throw ImpossibleRegimeError("classify_regime: all heat currents share one sign");
    for (double q : Q)
        if (std::abs(q) <= band) return Regime::Unclassified;

    const bool p1 = Q[0] > 0, p2 = Q[1] > 0, p3 = Q[2] > 0;
    const bool w_pos = W > band;
    if (p1 && !p2 && !p3) return w_pos ? Regime::I : Regime::Unclassified;
    if (p1 && p2 && !p3) return w_pos ? Regime::II : Regime::Unclassified;
    if (p1 && !p2 && p3) return w_pos ? Regime::III : Regime::IV;
    if (!p1 && p2 && !p3) return w_pos ? Regime::V : Regime::VI;
    if (!p1 && p2 && p3) return w_pos ? Regime::VII : Regime::VIII;
    if (!p1 && !p2 && p3) return w_pos ? Regime::IX : Regime::X;
    return Regime::Unclassified;
}

struct CopMetrics {
    std::optional<double> cop;      // Q1/Q3
    std::optional<double> cop_w;    // Q1/(Q3 + W)
    std::optional<double> cop_max;  // T1(T3−T2)/(T3(T2−T1))
    std::optional<double> cop_otto; // B1(B3−B2)/(B3(B2−B1))
};

inline CopMetrics cop_metrics(const std::array<double, 3>& Q, double W, const std::array<double, 3>& T,
                              const std::array<double, 3>& B) {
    CopMetrics m;
    if (Q[2] != 0.0) m.cop = Q[0] / Q[2];
    if (Q[2] + W != 0.0) m.cop_w = Q[0] / (Q[2] + W);
    if (T[1] != T[0] && T[2] != 0.0) m.cop_max = T[0] * (T[2] - T[1]) / (T[2] * (T[1] - T[0]));
    if (B[1] != B[0] && B[2] != 0.0) m.cop_otto = B[0] * (B[2] - B[1]) / (B[2] * (B[1] - B[0]));
    return m;
}

// y = slope·x + intercept in the (Q1/Q3, Q2/Q3) plane.
struct Line {
    double slope{0.0};
    double intercept{0.0};
    double at(double x) const { return slope * x + intercept; }
};

struct RegimeBoundaries {
    Line zero_work;       // W = 0
    Line zero_entropy;    // Sdot = 0
    // The axes Q1 = 0 and Q2 = 0 complete the partition.

    // Crossing of the two lines; its abscissa is the largest reachable Q1/Q3.
    std::array<double, 2> intersection() const {
        const double x = (zero_entropy.intercept - zero_work.intercept) /
                         (zero_work.slope - zero_entropy.slope);
        return {x, zero_work.at(x)};
    }
};

inline RegimeBoundaries regime_boundaries(const std::array<double, 3>& T) {
    for (double t : T)
        if (!(t > 0.0)) throw DomainError("regime_boundaries: temperatures must be > 0");
    RegimeBoundaries b;
    // Q1 + Q2 + Q3 = 0 and Q1/T1 + Q2/T2 + Q3/T3 = 0, divided by Q3.
    b.zero_work = {-1.0, -1.0};
    b.zero_entropy = {-T[1] / T[0], -T[1] / T[2]};
    return b;
}

enum class Role { engine, refrigerator, accelerator, idle };

inline std::string_view to_string(Role r) {
    switch (r) {
    case Role::engine: return "engine";
    case Role::refrigerator: return "refrigerator";
    case Role::accelerator: return "accelerator";
    case Role::idle: return "idle";
    }
    return "idle";
}

struct SubmachineFigures {
    int i{1}, j{2};             // i < j
    double C_ij{0.0};           // magnetization current i -> j
    double W_ij{0.0};           // (B_i − B_j) C_ij, positive when the pair delivers work
    double Q_ij{0.0};           // −B_i C_ij, heat passed to qubit i through the pair
    double Q_ji{0.0};           // −B_j C_ji
    Role role{Role::idle};
    std::optional<double> efficiency_or_cop;
};

inline double continuity_scale(const CurrentSet& c) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s = std::max({s, std::abs(c.q[k]), std::abs(c.C[k])});
    return s;
}

// Pairwise two-reservoir view of the local-model steady state.
inline std::array<SubmachineFigures, 3> submachine_report(const CurrentSet& c, const std::array<double, 3>& B,
                                                          const std::array<double, 3>& T,
                                                          double epsilon = kDefaultEpsilon) {
    const double scale = continuity_scale(c);
    const auto res = local_me::continuity_residuals(c);
    for (int k = 0; k < 3; ++k)
        if (std::abs(res[k]) > 1e-9 * scale + 1e-300)
            throw DomainError("submachine_report: currents violate continuity at site " +
                              std::to_string(k + 1));

    std::array<SubmachineFigures, 3> out;
    for (auto [i, j] : model::kPairs) {
        SubmachineFigures& f = out[model::pair_slot(i, j)];
        f.i = i;
        f.j = j;
        const double Bi = B[i - 1], Bj = B[j - 1];
        f.C_ij = c.current(i, j);
        f.W_ij = (Bi - Bj) * f.C_ij;
        f.Q_ij = -Bi * f.C_ij;
        f.Q_ji = -Bj * c.current(j, i);

        if (std::abs(f.C_ij) <= epsilon * scale) {
            f.role = Role::idle;
            continue;
        }
        const double B_lo = std::min(Bi, Bj), B_hi = std::max(Bi, Bj);
        // Summed over pairs W_ij gives −W, so W_ij >= 0 is work delivered.
        if (f.W_ij >= 0.0) {
            f.role = Role::engine;
            f.efficiency_or_cop = B_hi > 0.0 ? 1.0 - B_lo / B_hi : 0.0;
            continue;
        }
        // Work consumed: bath heat enters on the smaller-field side.
        const int absorbing = Bi < Bj ? i : j;
        const int rejecting = absorbing == i ? j : i;
        if (T[absorbing - 1] < T[rejecting - 1]) {
            f.role = Role::refrigerator;
            f.efficiency_or_cop = B_lo / (B_hi - B_lo);
        } else {
            f.role = Role::accelerator;
        }
    }
    return out;
}

enum class OttoRole { refrigerator, engine, accelerator, boundary };

inline std::string_view to_string(OttoRole r) {
    switch (r) {
    case OttoRole::refrigerator: return "refrigerator";
    case OttoRole::engine: return "engine";
    case OttoRole::accelerator: return "accelerator";
    case OttoRole::boundary: return "boundary";
    }
    return "boundary";
}

struct OttoConditions {
    std::array<OttoRole, 3> pair_roles{};   // keyed by pair slot
    bool inside_trapezoid{false};
};

// Otto windows for each pair, labelled so that T_lo < T_hi: refrigerator below
// B_lo/B_hi < T_lo/T_hi, engine between that and 1, accelerator above 1.
inline OttoConditions otto_conditions_and_trapezoid(const std::array<double, 3>& B,
                                                    const std::array<double, 3>& T) {
    for (int k = 0; k < 3; ++k)
        if (!(B[k] > 0.0) || !(T[k] > 0.0))
            throw DomainError("otto_conditions_and_trapezoid: fields and temperatures must be > 0");
    OttoConditions o;
    for (auto [i, j] : model::kPairs) {
        int lo = i, hi = j;
        if (T[j - 1] < T[i - 1]) std::swap(lo, hi);
        const double rb = B[lo - 1] / B[hi - 1];
        const double rt = T[lo - 1] / T[hi - 1];
        OttoRole r = OttoRole::boundary;
        if (rb < rt) r = OttoRole::refrigerator;
        else if (rb > rt && rb < 1.0) r = OttoRole::engine;
        else if (rb > 1.0) r = OttoRole::accelerator;
        o.pair_roles[model::pair_slot(i, j)] = r;
    }
    const double x = B[0] / B[2], y = B[1] / B[2];
    o.inside_trapezoid = y > (T[1] / T[0]) * x && T[1] / T[2] < y && y < 1.0;
    return o;
}

struct ThermoReport {
    BathModel bath_model{BathModel::repeated_interaction};
    std::array<double, 3> Q{};
    double W{0.0};
    double S_dot{0.0};
    Regime regime{Regime::Unclassified};
    CopMetrics cop;
    CurrentSet currents;
    std::vector<SubmachineFigures> submachines;   // local model only
    std::optional<OttoConditions> otto;           // requires all B > 0
    // W + sum Q in the local model, sum Q in the harmonic model.
    double first_law_residual{0.0};
    double constraint_residual{0.0};             // sum Q_i/B_i, local model only
    std::vector<std::string> flags;
};

inline double heat_scale(const ThermoReport& r) {
    return std::max({std::abs(r.Q[0]), std::abs(r.Q[1]), std::abs(r.Q[2]), std::abs(r.W)});
}

namespace detail {

// Currents of the harmonic model. Heat currents come from the extended-precision
// energy-basis state; the magnetization currents use the local generator forms.
inline CurrentSet harmonic_currents(const steady::Generator& g, const steady::Solution& s) {
    CurrentSet c;
    const auto d = s.rho_energy.rows();
    spin::Op<long double> E = spin::Op<long double>::Zero(d, d);
    // Energies measured from level 0, whose balance row the solver trades for the trace
    // condition; the rounding-level trace defect of each D_k then drops out of Σ Q_k.
    for (Eigen::Index k = 0; k < d; ++k) E(k, k) = g.spectrum->energies(k) - g.spectrum->energies(0);
    for (int k = 0; k < 3; ++k) {
        c.Q[k] = static_cast<double>(
            global_me::global_heat_current<long double>(s.rho_energy, E, g.energy_dissipators[k]));
        const spin::DenseOperator sz = spin::embed_pauli(k + 1, spin::Axis::z, model::kSites);
        c.q[k] = spin::expectation(
            spin::hermitize<double>(spin::apply<double>(g.dissipators[k], s.state.rho)), sz);
    }
    c.W = 0.0;
    c.C[0] = local_me::interqubit_current(s.state.rho, g.params, 2, 1);
    c.C[1] = local_me::interqubit_current(s.state.rho, g.params, 3, 1);
    c.C[2] = local_me::interqubit_current(s.state.rho, g.params, 3, 2);
    return c;
}

} // namespace detail

// Full steady-state analysis. Invariant failures become flags, not exceptions.
inline ThermoReport analyze(const steady::Generator& g, const steady::Solution& s,
                            double epsilon = kDefaultEpsilon) {
    const ModelParams& p = g.params;
    ThermoReport r;
    r.bath_model = p.bath_model;
    const bool harmonic = p.bath_model == BathModel::harmonic;
    r.currents = harmonic ? detail::harmonic_currents(g, s) : local_me::compute_currents(s.state.rho, p);
    r.Q = r.currents.Q;
    r.W = r.currents.W;
    r.S_dot = global_me::entropy_production(r.Q, p.T);
    const double scale = heat_scale(r);

    r.first_law_residual = r.W + r.Q[0] + r.Q[1] + r.Q[2];
    if (std::abs(r.first_law_residual) > 1e-10 * scale + local_me::current_floor(p))
        r.flags.push_back("first_law");
    if (r.S_dot < -1e-12) r.flags.push_back("second_law");
    if (!harmonic) {
        double cscale = 0.0;
        for (int k = 0; k < 3; ++k) {
            r.constraint_residual += r.Q[k] / p.B[k];
            cscale = std::max(cscale, std::abs(r.Q[k] / p.B[k]));
        }
        if (std::abs(r.constraint_residual) > 1e-10 * cscale + local_me::current_floor(p))
            r.flags.push_back("current_constraint");
    }

    try {
        r.regime = classify_regime(r.Q, r.W, epsilon);
    } catch (const ImpossibleRegimeError&) {
        r.regime = Regime::Unclassified;
        r.flags.push_back("same_sign_currents");
    }
    r.cop = cop_metrics(r.Q, r.W, p.T, p.B);
    if (std::all_of(p.B.begin(), p.B.end(), [](double b) { return b > 0.0; }))
        r.otto = otto_conditions_and_trapezoid(p.B, p.T);

    if (!harmonic) {
        try {
            const auto subs = submachine_report(r.currents, p.B, p.T, epsilon);
            r.submachines.assign(subs.begin(), subs.end());
        } catch (const DomainError&) {
            r.flags.push_back("continuity");
        }
    }
    return r;
}

} // namespace trimachine::thermo
