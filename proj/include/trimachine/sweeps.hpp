// sweeps.hpp — Seed-deterministic parameter sweeps (random atlas, B2 valve scan,
// work-recycling window), per-point evaluation and CSV persistence

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "trimachine/correlations.hpp"
#include "trimachine/errors.hpp"
#include "trimachine/model.hpp"
#include "trimachine/steady_state.hpp"
#include "trimachine/thermo.hpp"

namespace trimachine::sweeps {

using model::BathModel;
using model::ModelParams;

// ---------------------------------------------------------------------------
// Random numbers

// SplitMix64 output function.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent stream for sample `index`; uniform draws lie in (0, 1].
class PointRng {
public:
    PointRng(std::uint64_t master_seed, std::uint64_t index) : state_(master_seed ^ index) {}
    double uniform() { return static_cast<double>((splitmix64(state_) >> 11) + 1) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Parameter keys

// Flat names of every scalar in ModelParams, in sampling order.
inline const std::vector<std::string>& parameter_keys() {
    static const std::vector<std::string> keys{
        "B1", "B2", "B3", "gamma1", "gamma2", "gamma3", "J12", "J13", "J23",
        "Delta12", "Delta13", "Delta23", "T1", "T2", "T3"};
    return keys;
}

inline double& parameter_ref(ModelParams& p, std::string_view key) {
    auto pick = [&](std::array<double, 3>& a, std::string_view suffix,
                    const std::array<std::string_view, 3>& names) -> double* {
        for (int k = 0; k < 3; ++k)
            if (suffix == names[k]) return &a[k];
        return nullptr;
    };
    static constexpr std::array<std::string_view, 3> sites{"1", "2", "3"};
    static constexpr std::array<std::string_view, 3> pairs{"12", "13", "23"};
    double* r = nullptr;
    if (key.substr(0, 5) == "gamma") r = pick(p.gamma, key.substr(5), sites);
    else if (key.substr(0, 5) == "Delta") r = pick(p.Delta, key.substr(5), pairs);
    else if (key.substr(0, 1) == "B") r = pick(p.B, key.substr(1), sites);
    else if (key.substr(0, 1) == "T") r = pick(p.T, key.substr(1), sites);
    else if (key.substr(0, 1) == "J") r = pick(p.J, key.substr(1), pairs);
    if (!r) throw ConfigError("unknown parameter key '" + std::string(key) + "'");
    return *r;
}

// ---------------------------------------------------------------------------
// Configuration

struct Range {
    double lo{0.0};
    double hi{0.0};
};

struct Grid {
    double lo{0.0};
    double hi{0.0};
    int n{0};

    std::vector<double> points() const {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            v[static_cast<std::size_t>(k)] = n == 1 ? lo : lo + (hi - lo) * k / (n - 1);
        return v;
    }
};

struct SweepConfig {
    ModelParams params;                        // fixed values; sampled keys are overwritten
    std::map<std::string, Range> ranges;       // keyed by parameter_keys()
    std::size_t n_samples{1};
    std::uint64_t master_seed{0};
    std::optional<double> discard_rule;        // flag when min B < rule · max gamma
    double min_B{1e-3};                        // sampled fields below this are redrawn
    double epsilon{thermo::kDefaultEpsilon};
    Grid B2_grid;
    std::vector<BathModel> bath_models;        // valve scan; defaults to params.bath_model
};

// Harmonic sweeps flag points with min B < 100 · max gamma unless configured otherwise.
inline std::optional<double> effective_discard_rule(const SweepConfig& cfg) {
    if (cfg.discard_rule) return cfg.discard_rule;
    if (cfg.params.bath_model == BathModel::harmonic) return 100.0;
    return std::nullopt;
}

inline void validate(const SweepConfig& cfg) {
    if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");
    for (const auto& [key, r] : cfg.ranges) {
        ModelParams probe;
        (void)parameter_ref(probe, key);
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
            throw ConfigError("range for " + key + " must be finite with lo <= hi");
        if (key[0] == 'B' && r.hi < cfg.min_B)
            throw ConfigError("range for " + key + " lies entirely below min_B");
    }
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

inline ModelParams draw_params(const SweepConfig& cfg, std::uint64_t index) {
    ModelParams p = cfg.params;
    PointRng rng(cfg.master_seed, index);
    for (const std::string& key : parameter_keys()) {
        const auto it = cfg.ranges.find(key);
        if (it == cfg.ranges.end()) continue;
        double v = rng.uniform(it->second.lo, it->second.hi);
        if (key[0] == 'B')
            while (v < cfg.min_B) v = rng.uniform(it->second.lo, it->second.hi);
        parameter_ref(p, key) = v;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Records

using Opt = std::optional<double>;

struct SweepRecord {
    std::uint64_t sample_index{0};
    ModelParams params;
    std::array<Opt, 3> Q{};
    Opt W, Sdot;
    std::array<Opt, 3> q{};
    std::array<Opt, 3> C{};                    // C21, C31, C32
    std::string regime;
    Opt cop, cop_w, cop_max, cop_otto;
    std::optional<bool> inside_trapezoid;
    std::array<Opt, 3> I{}, mibound{}, xres{};
    std::array<std::optional<bool>, 3> ppt{};
    Opt nullspace_residual;
    std::vector<std::string> flags;
    // valve layout
    std::string combination;
    // boost layout: cop, cop_w, cop_otto divided by cop_max
    Opt cop_norm, cop_w_norm, cop_otto_norm;

    bool has_flag(std::string_view f) const {
        return std::find(flags.begin(), flags.end(), f) != flags.end();
    }
    bool solved() const { return Q[0].has_value(); }
};

inline std::string sanitize_flag(std::string s) {
    for (char& c : s)
        if (c == ',' || c == ';' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

inline constexpr std::array<std::string_view, 3> kPairTags{"12", "13", "23"};

// Steady state plus all reports for one parameter point.
struct PointAnalysis {
    steady::Generator generator;
    steady::Solution solution;
    thermo::ThermoReport thermo;
    correlations::CorrelationReport correlations;
};

inline PointAnalysis analyze_point(const ModelParams& p, double epsilon = thermo::kDefaultEpsilon) {
    PointAnalysis a;
    a.generator = steady::assemble(p);
    a.solution = steady::solve(a.generator);
    a.thermo = thermo::analyze(a.generator, a.solution, epsilon);
    a.correlations = correlations::analyze(a.solution.state.rho, p, a.thermo.currents);
    return a;
}

// Record for one point; solver failures become flags.
inline SweepRecord evaluate_point(const ModelParams& p, std::uint64_t index,
                                  std::optional<double> discard_rule = std::nullopt,
                                  double epsilon = thermo::kDefaultEpsilon) {
    SweepRecord r;
    r.sample_index = index;
    r.params = p;
    if (discard_rule) {
        const double bmin = *std::min_element(p.B.begin(), p.B.end());
        const double gmax = *std::max_element(p.gamma.begin(), p.gamma.end());
        if (bmin < *discard_rule * gmax) r.flags.push_back("discarded");
    }
    PointAnalysis a;
    try {
        a = analyze_point(p, epsilon);
    } catch (const std::exception& e) {
        r.flags.push_back(sanitize_flag(std::string("solve_failed: ") + e.what()));
        return r;
    }
    const thermo::ThermoReport& t = a.thermo;
    for (const auto& w : a.generator.warnings) r.flags.push_back(sanitize_flag(w));
    for (const auto& f : t.flags) r.flags.push_back(f);

    for (int k = 0; k < 3; ++k) {
        r.Q[k] = t.Q[k];
        r.q[k] = t.currents.q[k];
        r.C[k] = t.currents.C[k];
    }
    r.W = t.W;
    r.Sdot = t.S_dot;
    r.regime = std::string(thermo::to_string(t.regime));
    r.cop = t.cop.cop;
    r.cop_w = t.cop.cop_w;
    r.cop_max = t.cop.cop_max;
    r.cop_otto = t.cop.cop_otto;
    if (t.otto) r.inside_trapezoid = t.otto->inside_trapezoid;
    r.nullspace_residual = a.solution.state.residual;

    const bool local = p.bath_model == BathModel::repeated_interaction;
    if (local) {
        const double scale = thermo::heat_scale(t);
        for (int k = 0; k < 3; ++k)
            if (std::abs(t.Q[k] - p.B[k] * t.currents.q[k]) > 1e-10 * scale + local_me::current_floor(p)) {
                r.flags.push_back("heat_magnetization");
                break;
            }
    }

    const correlations::CorrelationReport& c = a.correlations;
    for (int k = 0; k < 3; ++k) {
        const std::string tag(kPairTags[k]);
        r.I[k] = c.I[k];
        r.mibound[k] = c.mi_bound[k];
        r.xres[k] = c.x_form_residual[k];
        r.ppt[k] = c.ppt_negative[k];
        if (p.J[k] > 0.0 && !c.mi_bound[k]) r.flags.push_back("mi_bound_domain" + tag);
        if (c.x_form_residual[k] <= 1e-8) {
            if (c.x_eigen_mismatch[k] > 1e-10) r.flags.push_back("x_eigenvalues" + tag);
            if (c.mi_bound[k] && c.I[k] < *c.mi_bound[k] - 1e-10) r.flags.push_back("mi_bound" + tag);
        }
        if (c.I[k] < -1e-10) r.flags.push_back("negative_mi" + tag);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Execution

// Runs body(k) for k in [0, n) on `workers` threads. Results must be written to
// per-index slots; completion order is irrelevant.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) body(k);
        });
    for (auto& t : pool) t.join();
}

inline std::vector<SweepRecord> random_sweep(const SweepConfig& cfg, unsigned workers = 1) {
    validate(cfg);
    const auto rule = effective_discard_rule(cfg);
    std::vector<SweepRecord> out(cfg.n_samples);
    parallel_for(cfg.n_samples, workers, [&](std::size_t k) {
        try {
            out[k] = evaluate_point(draw_params(cfg, k), k, rule, cfg.epsilon);
        } catch (const std::exception& e) {
            out[k].sample_index = k;
            out[k].flags.push_back(sanitize_flag(std::string("solve_failed: ") + e.what()));
        }
    });
    return out;
}

// Sign combination of (Q1, Q3); "none" when either lies inside the epsilon band.
inline std::string heat_combination(const SweepRecord& r, double epsilon = thermo::kDefaultEpsilon) {
    if (!r.solved()) return "none";
    double scale = std::abs(*r.W);
    for (const auto& q : r.Q) scale = std::max(scale, std::abs(*q));
    const double q1 = *r.Q[0], q3 = *r.Q[2];
    if (std::abs(q1) <= epsilon * scale || std::abs(q3) <= epsilon * scale) return "none";
    return std::string("Q1") + (q1 > 0 ? "+" : "-") + "Q3" + (q3 > 0 ? "+" : "-");
}

// One record per (bath model, grid point); model-major sample indices.
inline std::vector<SweepRecord> valve_sweep(const SweepConfig& cfg, unsigned workers = 1) {
    if (cfg.B2_grid.n < 1) throw ConfigError("B2_grid.n must be >= 1");
    const std::vector<double> grid = cfg.B2_grid.points();
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) throw ConfigError("B2_grid must be strictly increasing");
    std::vector<BathModel> models = cfg.bath_models;
    if (models.empty()) models.push_back(cfg.params.bath_model);

    const std::size_t n = models.size() * grid.size();
    std::vector<SweepRecord> out(n);
    parallel_for(n, workers, [&](std::size_t k) {
        ModelParams p = cfg.params;
        p.bath_model = models[k / grid.size()];
        p.B[1] = grid[k % grid.size()];
        out[k] = evaluate_point(p, k, cfg.discard_rule, cfg.epsilon);
        out[k].combination = heat_combination(out[k], cfg.epsilon);
    });
    return out;
}

struct BoostResult {
    std::vector<SweepRecord> records;      // admissible grid points
    std::optional<SweepRecord> edge;       // W = 0 upper edge, located by bisection
    std::string status;                    // "ok" or "empty_window"
};

// Both the machine and the work-recycling composite refrigerate: regime IV,
// W <= 0 and a positive composite COP.
inline bool boost_admissible(const SweepRecord& r) {
    return r.solved() && r.regime == "IV" && *r.W <= 0.0 && r.cop_otto && *r.cop_otto > 0.0;
}

inline void attach_normalized(SweepRecord& r) {
    if (!r.cop_max || *r.cop_max == 0.0) return;
    if (r.cop) r.cop_norm = *r.cop / *r.cop_max;
    if (r.cop_w) r.cop_w_norm = *r.cop_w / *r.cop_max;
    if (r.cop_otto) r.cop_otto_norm = *r.cop_otto / *r.cop_max;
}

inline BoostResult boost_scan(const SweepConfig& cfg, unsigned workers = 1) {
    if (cfg.B2_grid.n < 2) throw ConfigError("B2_grid.n must be >= 2 for the boost scan");
    const std::vector<double> grid = cfg.B2_grid.points();
    std::vector<SweepRecord> all(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t k) {
        ModelParams p = cfg.params;
        p.B[1] = grid[k];
        all[k] = evaluate_point(p, k, cfg.discard_rule, cfg.epsilon);
    });

    BoostResult out;
    std::optional<std::size_t> last;
    for (std::size_t k = 0; k < all.size(); ++k)
        if (boost_admissible(all[k])) {
            attach_normalized(all[k]);
            out.records.push_back(all[k]);
            last = k;
        }
    if (out.records.empty()) {
        out.status = "empty_window";
        return out;
    }
    out.status = "ok";

    // Upper edge: the admissible window closes where W crosses zero.
    if (*last + 1 < all.size() && all[*last + 1].solved() && *all[*last + 1].W > 0.0) {
        double lo = grid[*last], hi = grid[*last + 1];
        auto work_at = [&](double b2) {
            ModelParams p = cfg.params;
            p.B[1] = b2;
            return analyze_point(p, cfg.epsilon).thermo.W;
        };
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (work_at(mid) <= 0.0) lo = mid;
            else hi = mid;
        }
        ModelParams p = cfg.params;
        p.B[1] = lo;
        SweepRecord e = evaluate_point(p, all.size(), cfg.discard_rule, cfg.epsilon);
        attach_normalized(e);
        out.edge = e;
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV

enum class Layout { standard, valve, boost };

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s, std::string_view column) {
    const std::string tmp(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size())
        throw ConfigError("csv: bad number '" + tmp + "' in column " + std::string(column));
    return v;
}

struct Column {
    std::string name;
    std::function<std::string(const SweepRecord&)> get;
    std::function<void(SweepRecord&, std::string_view)> set;
};

namespace detail {

inline Column number(std::string name, std::function<double&(SweepRecord&)> ref) {
    return {name,
            [ref](const SweepRecord& r) { return format_double(ref(const_cast<SweepRecord&>(r))); },
            [ref, name](SweepRecord& r, std::string_view s) { ref(r) = parse_double(s, name); }};
}

inline Column optional_number(std::string name, std::function<Opt&(SweepRecord&)> ref) {
    return {name,
            [ref](const SweepRecord& r) {
                const Opt& v = ref(const_cast<SweepRecord&>(r));
                return v ? format_double(*v) : std::string();
            },
            [ref, name](SweepRecord& r, std::string_view s) {
                ref(r) = s.empty() ? Opt{} : Opt{parse_double(s, name)};
            }};
}

inline Column optional_bool(std::string name, std::function<std::optional<bool>&(SweepRecord&)> ref) {
    return {name,
            [ref](const SweepRecord& r) {
                const auto& v = ref(const_cast<SweepRecord&>(r));
                return v ? std::string(*v ? "1" : "0") : std::string();
            },
            [ref, name](SweepRecord& r, std::string_view s) {
                if (s.empty()) ref(r).reset();
                else if (s == "0" || s == "1") ref(r) = s == "1";
                else throw ConfigError("csv: bad boolean in column " + name);
            }};
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k)
        if (k == s.size() || s[k] == sep) {
            out.emplace_back(s.substr(start, k - start));
            start = k + 1;
        }
    return out;
}

} // namespace detail

inline std::vector<Column> columns(Layout layout) {
    using detail::number;
    using detail::optional_bool;
    using detail::optional_number;
    std::vector<Column> c;
    c.push_back({"sample_index", [](const SweepRecord& r) { return std::to_string(r.sample_index); },
                 [](SweepRecord& r, std::string_view s) {
                     r.sample_index = std::stoull(std::string(s));
                 }});
    c.push_back({"bath_model",
                 [](const SweepRecord& r) { return std::string(model::to_string(r.params.bath_model)); },
                 [](SweepRecord& r, std::string_view s) {
                     r.params.bath_model = model::bath_model_from_string(s);
                 }});
    const std::array<std::string, 3> sites{"1", "2", "3"};
    const std::array<std::string, 3> pairs{"12", "13", "23"};
    for (int k = 0; k < 3; ++k) c.push_back(number("B" + sites[k], [k](SweepRecord& r) -> double& { return r.params.B[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(number("J" + pairs[k], [k](SweepRecord& r) -> double& { return r.params.J[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(number("D" + pairs[k], [k](SweepRecord& r) -> double& { return r.params.Delta[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(number("T" + sites[k], [k](SweepRecord& r) -> double& { return r.params.T[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(number("g" + sites[k], [k](SweepRecord& r) -> double& { return r.params.gamma[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_number("Q" + sites[k], [k](SweepRecord& r) -> Opt& { return r.Q[k]; }));
    c.push_back(optional_number("W", [](SweepRecord& r) -> Opt& { return r.W; }));
    c.push_back(optional_number("Sdot", [](SweepRecord& r) -> Opt& { return r.Sdot; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_number("q" + sites[k], [k](SweepRecord& r) -> Opt& { return r.q[k]; }));
    const std::array<std::string, 3> cnames{"C21", "C31", "C32"};
    for (int k = 0; k < 3; ++k) c.push_back(optional_number(cnames[k], [k](SweepRecord& r) -> Opt& { return r.C[k]; }));
    c.push_back({"regime", [](const SweepRecord& r) { return r.regime; },
                 [](SweepRecord& r, std::string_view s) { r.regime = std::string(s); }});
    c.push_back(optional_number("cop", [](SweepRecord& r) -> Opt& { return r.cop; }));
    c.push_back(optional_number("cop_w", [](SweepRecord& r) -> Opt& { return r.cop_w; }));
    c.push_back(optional_number("cop_max", [](SweepRecord& r) -> Opt& { return r.cop_max; }));
    c.push_back(optional_number("cop_otto", [](SweepRecord& r) -> Opt& { return r.cop_otto; }));
    c.push_back(optional_bool("inside_trapezoid", [](SweepRecord& r) -> std::optional<bool>& { return r.inside_trapezoid; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_number("I" + pairs[k], [k](SweepRecord& r) -> Opt& { return r.I[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_number("mibound" + pairs[k], [k](SweepRecord& r) -> Opt& { return r.mibound[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_number("xres" + pairs[k], [k](SweepRecord& r) -> Opt& { return r.xres[k]; }));
    for (int k = 0; k < 3; ++k) c.push_back(optional_bool("ppt" + sites[k], [k](SweepRecord& r) -> std::optional<bool>& { return r.ppt[k]; }));
    c.push_back(optional_number("nullspace_residual", [](SweepRecord& r) -> Opt& { return r.nullspace_residual; }));
    c.push_back({"flags",
                 [](const SweepRecord& r) {
                     std::string s;
                     for (std::size_t k = 0; k < r.flags.size(); ++k) s += (k ? ";" : "") + sanitize_flag(r.flags[k]);
                     return s;
                 },
                 [](SweepRecord& r, std::string_view s) {
                     r.flags.clear();
                     if (!s.empty()) r.flags = detail::split(s, ';');
                 }});
    if (layout == Layout::valve)
        c.push_back({"combination", [](const SweepRecord& r) { return r.combination; },
                     [](SweepRecord& r, std::string_view s) { r.combination = std::string(s); }});
    if (layout == Layout::boost) {
        c.push_back(optional_number("cop_norm", [](SweepRecord& r) -> Opt& { return r.cop_norm; }));
        c.push_back(optional_number("cop_w_norm", [](SweepRecord& r) -> Opt& { return r.cop_w_norm; }));
        c.push_back(optional_number("cop_otto_norm", [](SweepRecord& r) -> Opt& { return r.cop_otto_norm; }));
    }
    return c;
}

// Lines starting with '#' precede the header; `comment` is written verbatim after "# ".
inline void write_records(std::ostream& os, const std::vector<SweepRecord>& records,
                          Layout layout = Layout::standard, const std::string& comment = "") {
    const auto cols = columns(layout);
    if (!comment.empty()) os << "# " << comment << "\n";
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k].name;
    os << "\n";
    for (const auto& r : records) {
        for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k].get(r);
        os << "\n";
    }
}

inline void write_records(const std::string& path, const std::vector<SweepRecord>& records,
                          Layout layout = Layout::standard, const std::string& comment = "") {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_records: cannot open '" + path + "' for writing");
    write_records(f, records, layout, comment);
    f.flush();
    if (!f) throw std::runtime_error("write_records: write to '" + path + "' failed");
}

inline std::vector<SweepRecord> read_records(std::istream& is) {
    std::string line;
    while (std::getline(is, line) && !line.empty() && line[0] == '#') {
    }
    if (line.empty()) throw ConfigError("csv: missing header");
    const auto names = detail::split(line, ',');
    std::vector<Column> table;
    for (Layout l : {Layout::standard, Layout::valve, Layout::boost})
        for (auto& c : columns(l))
            if (std::none_of(table.begin(), table.end(), [&](const Column& t) { return t.name == c.name; }))
                table.push_back(std::move(c));
    std::vector<const Column*> order;
    for (const auto& n : names) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const Column& c) { return c.name == n; });
        if (it == table.end()) throw ConfigError("csv: unknown column '" + n + "'");
        order.push_back(&*it);
    }
    std::vector<SweepRecord> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (fields.size() != order.size())
            throw ConfigError("csv: row has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(order.size()));
        SweepRecord r;
        for (std::size_t k = 0; k < fields.size(); ++k) order[k]->set(r, fields[k]);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<SweepRecord> read_records(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_records: cannot open '" + path + "'");
    return read_records(f);
}

} // namespace trimachine::sweeps
