// cli.hpp — JSON configuration schema, flat overrides, report serialization and
// subcommand dispatch for the command-line tool

#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "trimachine/correlations.hpp"
#include "trimachine/errors.hpp"
#include "trimachine/model.hpp"
#include "trimachine/sweeps.hpp"
#include "trimachine/thermo.hpp"

namespace trimachine::cli {

using nlohmann::json;
using sweeps::SweepConfig;

struct Command {
    std::string subcommand;                 // point, sweep-random, sweep-valve, sweep-boost, validate
    std::string config_path;
    std::string output_path;                // empty: stdout
    std::vector<std::string> overrides;     // KEY=VALUE
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    unsigned workers{1};
};

inline constexpr std::string_view kConfigPrefix = "# config=";

// ---------------------------------------------------------------------------
// Schema

namespace detail {

inline const std::set<std::string>& top_level_keys() {
    static const std::set<std::string> keys{
        "bath_model", "B", "J", "Delta", "T", "gamma", "ranges", "n_samples", "master_seed",
        "discard_rule", "min_B", "epsilon", "B2_grid", "bath_models"};
    return keys;
}

inline std::array<double, 3> triple(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("config key '" + key + "' must be an array of 3 numbers");
    std::array<double, 3> a{};
    for (int k = 0; k < 3; ++k) {
        if (!j[k].is_number()) throw ConfigError("config key '" + key + "' must hold numbers");
        a[k] = j[k].get<double>();
    }
    return a;
}

inline double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return j.get<double>();
}

inline double parse_number(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("override '" + key + "' needs a number, got '" + s + "'");
    }
}

inline std::uint64_t parse_unsigned(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size() || (!s.empty() && s[0] == '-')) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("override '" + key + "' needs a nonnegative integer, got '" + s + "'");
    }
}

// Which array and slot a flat parameter key lives in.
inline std::pair<std::string, int> array_slot(const std::string& key) {
    static const std::map<std::string, std::pair<std::string, int>> table{
        {"B1", {"B", 0}},         {"B2", {"B", 1}},         {"B3", {"B", 2}},
        {"J12", {"J", 0}},        {"J13", {"J", 1}},        {"J23", {"J", 2}},
        {"Delta12", {"Delta", 0}}, {"Delta13", {"Delta", 1}}, {"Delta23", {"Delta", 2}},
        {"T1", {"T", 0}},         {"T2", {"T", 1}},         {"T3", {"T", 2}},
        {"gamma1", {"gamma", 0}}, {"gamma2", {"gamma", 1}}, {"gamma3", {"gamma", 2}}};
    const auto it = table.find(key);
    if (it == table.end()) return {"", -1};
    return it->second;
}

} // namespace detail

inline SweepConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!detail::top_level_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");

    SweepConfig cfg;
    for (const char* required : {"bath_model", "J", "Delta"})
        if (!j.contains(required)) throw ConfigError(std::string("config is missing '") + required + "'");
    if (!j["bath_model"].is_string()) throw ConfigError("config key 'bath_model' must be a string");
    cfg.params.bath_model = model::bath_model_from_string(j["bath_model"].get<std::string>());
    cfg.params.J = detail::triple(j["J"], "J");
    cfg.params.Delta = detail::triple(j["Delta"], "Delta");
    if (j.contains("B")) cfg.params.B = detail::triple(j["B"], "B");
    if (j.contains("gamma")) cfg.params.gamma = detail::triple(j["gamma"], "gamma");
    if (j.contains("T")) cfg.params.T = detail::triple(j["T"], "T");

    if (j.contains("ranges")) {
        if (!j["ranges"].is_object()) throw ConfigError("config key 'ranges' must be an object");
        for (const auto& [key, r] : j["ranges"].items()) {
            if (detail::array_slot(key).second < 0) throw ConfigError("unknown range key '" + key + "'");
            const std::string name = "ranges." + key;
            if (!r.is_array() || r.size() != 2) throw ConfigError(name + " must be [lo, hi]");
            cfg.ranges[key] = {detail::number(r[0], name), detail::number(r[1], name)};
        }
    }
    if (j.contains("n_samples")) {
        if (!j["n_samples"].is_number_integer() || j["n_samples"].get<long long>() < 1)
            throw ConfigError("config key 'n_samples' must be an integer >= 1");
        cfg.n_samples = j["n_samples"].get<std::size_t>();
    }
    if (j.contains("master_seed")) {
        if (!j["master_seed"].is_number_unsigned())
            throw ConfigError("config key 'master_seed' must be a nonnegative integer");
        cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    }
    if (j.contains("discard_rule") && !j["discard_rule"].is_null())
        cfg.discard_rule = detail::number(j["discard_rule"], "discard_rule");
    if (j.contains("min_B")) cfg.min_B = detail::number(j["min_B"], "min_B");
    if (j.contains("epsilon")) cfg.epsilon = detail::number(j["epsilon"], "epsilon");
    if (j.contains("B2_grid")) {
        const json& g = j["B2_grid"];
        if (!g.is_object()) throw ConfigError("config key 'B2_grid' must be an object");
        for (const auto& [key, _] : g.items())
            if (key != "lo" && key != "hi" && key != "n") throw ConfigError("unknown key 'B2_grid." + key + "'");
        if (!g.contains("lo") || !g.contains("hi") || !g.contains("n"))
            throw ConfigError("B2_grid needs lo, hi and n");
        if (!g["n"].is_number_integer()) throw ConfigError("B2_grid.n must be an integer");
        cfg.B2_grid = {detail::number(g["lo"], "B2_grid.lo"), detail::number(g["hi"], "B2_grid.hi"),
                       g["n"].get<int>()};
    }
    if (j.contains("bath_models")) {
        if (!j["bath_models"].is_array()) throw ConfigError("config key 'bath_models' must be an array");
        for (const auto& m : j["bath_models"]) {
            if (!m.is_string()) throw ConfigError("bath_models entries must be strings");
            cfg.bath_models.push_back(model::bath_model_from_string(m.get<std::string>()));
        }
    }
    sweeps::validate(cfg);
    return cfg;
}

// Canonical form of an effective configuration; parsing it back yields the same config.
inline json config_to_json(const SweepConfig& cfg) {
    json j;
    j["bath_model"] = std::string(model::to_string(cfg.params.bath_model));
    j["B"] = cfg.params.B;
    j["J"] = cfg.params.J;
    j["Delta"] = cfg.params.Delta;
    j["T"] = cfg.params.T;
    j["gamma"] = cfg.params.gamma;
    json ranges = json::object();
    for (const auto& [key, r] : cfg.ranges) ranges[key] = {r.lo, r.hi};
    j["ranges"] = ranges;
    j["n_samples"] = cfg.n_samples;
    j["master_seed"] = cfg.master_seed;
    j["discard_rule"] = cfg.discard_rule ? json(*cfg.discard_rule) : json(nullptr);
    j["min_B"] = cfg.min_B;
    j["epsilon"] = cfg.epsilon;
    j["B2_grid"] = {{"lo", cfg.B2_grid.lo}, {"hi", cfg.B2_grid.hi}, {"n", cfg.B2_grid.n}};
    json models = json::array();
    for (auto m : cfg.bath_models) models.push_back(std::string(model::to_string(m)));
    j["bath_models"] = models;
    return j;
}

// Applies one KEY=VALUE override to a raw JSON config.
inline void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not KEY=VALUE");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    if (const auto [array, slot] = detail::array_slot(key); slot >= 0) {
        if (!j.contains(array)) j[array] = {0.0, 0.0, 0.0};
        if (!j[array].is_array() || j[array].size() != 3)
            throw ConfigError("config key '" + array + "' must be an array of 3 numbers");
        j[array][slot] = detail::parse_number(value, key);
        return;
    }
    if (key == "bath_model") {
        (void)model::bath_model_from_string(value);
        j[key] = value;
    } else if (key == "n_samples" || key == "master_seed") {
        j[key] = detail::parse_unsigned(value, key);
    } else if (key == "discard_rule") {
        j[key] = value == "none" ? json(nullptr) : json(detail::parse_number(value, key));
    } else if (key == "min_B" || key == "epsilon") {
        j[key] = detail::parse_number(value, key);
    } else if (key == "B2_grid.lo" || key == "B2_grid.hi") {
        j["B2_grid"][key.substr(8)] = detail::parse_number(value, key);
    } else if (key == "B2_grid.n") {
        j["B2_grid"]["n"] = detail::parse_unsigned(value, key);
    } else if (key == "bath_models") {
        json models = json::array();
        std::stringstream ss(value);
        for (std::string m; std::getline(ss, m, ',');) {
            (void)model::bath_model_from_string(m);
            models.push_back(m);
        }
        j[key] = models;
    } else if (key.rfind("ranges.", 0) == 0) {
        const std::string name = key.substr(7);
        if (detail::array_slot(name).second < 0) throw ConfigError("unknown range key '" + name + "'");
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw ConfigError("override '" + key + "' needs LO:HI");
        j["ranges"][name] = {detail::parse_number(value.substr(0, colon), key),
                             detail::parse_number(value.substr(colon + 1), key)};
    } else {
        throw ConfigError("unknown override key '" + key + "'");
    }
}

// Reads a JSON config, or the echoed config line at the top of a CSV written by this tool.
inline json load_config_json(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    try {
        if (text.rfind(kConfigPrefix, 0) == 0) {
            const auto end = text.find('\n');
            return json::parse(text.substr(kConfigPrefix.size(), end - kConfigPrefix.size()));
        }
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

inline SweepConfig effective_config(const Command& cmd) {
    json j = load_config_json(cmd.config_path);
    for (const auto& o : cmd.overrides) apply_override(j, o);
    if (cmd.seed) j["master_seed"] = *cmd.seed;
    if (cmd.samples) j["n_samples"] = *cmd.samples;
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json point_report(const sweeps::PointAnalysis& a) {
    const thermo::ThermoReport& t = a.thermo;
    const correlations::CorrelationReport& c = a.correlations;
    json j;
    json params;
    params["bath_model"] = std::string(model::to_string(a.generator.params.bath_model));
    params["B"] = a.generator.params.B;
    params["J"] = a.generator.params.J;
    params["Delta"] = a.generator.params.Delta;
    params["T"] = a.generator.params.T;
    params["gamma"] = a.generator.params.gamma;
    j["params"] = params;
    j["steady_state"] = {{"residual", a.solution.state.residual},
                         {"nullspace_dim", a.solution.state.nullspace_dim}};
    json th;
    th["Q"] = t.Q;
    th["W"] = t.W;
    th["Sdot"] = t.S_dot;
    th["regime"] = std::string(thermo::to_string(t.regime));
    th["cop"] = optional_json(t.cop.cop);
    th["cop_w"] = optional_json(t.cop.cop_w);
    th["cop_max"] = optional_json(t.cop.cop_max);
    th["cop_otto"] = optional_json(t.cop.cop_otto);
    th["q"] = t.currents.q;
    th["C"] = {{"C21", t.currents.C[0]}, {"C31", t.currents.C[1]}, {"C32", t.currents.C[2]}};
    th["first_law_residual"] = t.first_law_residual;
    th["constraint_residual"] = t.constraint_residual;
    json subs = json::array();
    for (const auto& s : t.submachines)
        subs.push_back({{"pair", {s.i, s.j}},
                        {"C_ij", s.C_ij},
                        {"W_ij", s.W_ij},
                        {"Q_ij", s.Q_ij},
                        {"Q_ji", s.Q_ji},
                        {"role", std::string(thermo::to_string(s.role))},
                        {"efficiency_or_cop", optional_json(s.efficiency_or_cop)}});
    th["submachines"] = subs;
    if (t.otto) {
        json roles = json::array();
        for (auto r : t.otto->pair_roles) roles.push_back(std::string(thermo::to_string(r)));
        th["otto"] = {{"pair_roles", roles}, {"inside_trapezoid", t.otto->inside_trapezoid}};
    } else {
        th["otto"] = nullptr;
    }
    th["flags"] = t.flags;
    j["thermo"] = th;
    json co;
    co["I"] = c.I;
    co["x_form_residual"] = c.x_form_residual;
    json bounds = json::array();
    for (const auto& b : c.mi_bound) bounds.push_back(optional_json(b));
    co["mi_bound"] = bounds;
    co["ppt_negative"] = c.ppt_negative;
    co["ppt_min_eigenvalue"] = c.ppt_min_eigenvalue;
    j["correlations"] = co;
    j["warnings"] = a.generator.warnings;
    return j;
}

// ---------------------------------------------------------------------------
// Invariant suite

struct CheckResult {
    std::string name;
    std::size_t violations{0};
    std::size_t checked{0};
    bool passed() const { return violations == 0; }
};

inline std::vector<CheckResult> validate_records(const std::vector<sweeps::SweepRecord>& records) {
    std::vector<CheckResult> out;
    auto count = [&](const std::string& name, auto&& applies, auto&& violates) {
        CheckResult c{name};
        for (const auto& r : records)
            if (applies(r)) {
                ++c.checked;
                if (violates(r)) ++c.violations;
            }
        out.push_back(c);
    };
    auto usable = [](const sweeps::SweepRecord& r) { return r.solved() && !r.has_flag("discarded"); };
    auto local = [&](const sweeps::SweepRecord& r) {
        return usable(r) && r.params.bath_model == model::BathModel::repeated_interaction;
    };
    auto any_prefix = [](const sweeps::SweepRecord& r, std::string_view prefix) {
        return std::any_of(r.flags.begin(), r.flags.end(),
                           [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
    };
    count("solver", [](const auto& r) { return !r.has_flag("discarded"); },
          [&](const auto& r) { return any_prefix(r, "solve_failed"); });
    count("first_law", usable, [](const auto& r) { return r.has_flag("first_law"); });
    count("second_law", usable, [](const auto& r) { return r.has_flag("second_law"); });
    count("sign_pattern", usable, [](const auto& r) { return r.has_flag("same_sign_currents"); });
    count("current_constraint", local, [](const auto& r) { return r.has_flag("current_constraint"); });
    count("heat_magnetization", local, [](const auto& r) { return r.has_flag("heat_magnetization"); });
    count("continuity", local, [](const auto& r) { return r.has_flag("continuity"); });
    count("mi_bound", local, [&](const auto& r) { return any_prefix(r, "mi_bound1") || any_prefix(r, "mi_bound2"); });
    count("x_eigenvalues", local, [&](const auto& r) { return any_prefix(r, "x_eigenvalues"); });
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch

inline int run(const Command& cmd, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const SweepConfig cfg = effective_config(cmd);
    const std::string echo = std::string(kConfigPrefix.substr(2)) + config_to_json(cfg).dump();

    auto emit = [&](const std::vector<sweeps::SweepRecord>& recs, sweeps::Layout layout) {
        if (cmd.output_path.empty()) sweeps::write_records(out, recs, layout, echo);
        else sweeps::write_records(cmd.output_path, recs, layout, echo);
    };
    auto summary = [&](const std::vector<sweeps::SweepRecord>& recs) {
        std::size_t failed = 0, discarded = 0;
        for (const auto& r : recs) {
            if (!r.solved()) ++failed;
            if (r.has_flag("discarded")) ++discarded;
        }
        err << recs.size() << " records, " << failed << " solver failures, " << discarded
            << " discarded\n";
        return failed;
    };

    if (cmd.subcommand == "point") {
        const sweeps::PointAnalysis a = sweeps::analyze_point(cfg.params, cfg.epsilon);
        const std::string text = point_report(a).dump(2) + "\n";
        if (cmd.output_path.empty()) out << text;
        else {
            std::ofstream f(cmd.output_path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open '" + cmd.output_path + "' for writing");
            f << text;
        }
        return 0;
    }
    if (cmd.subcommand == "sweep-random") {
        const auto recs = sweeps::random_sweep(cfg, cmd.workers);
        emit(recs, sweeps::Layout::standard);
        return summary(recs) == 0 ? 0 : 2;
    }
    if (cmd.subcommand == "sweep-valve") {
        const auto recs = sweeps::valve_sweep(cfg, cmd.workers);
        emit(recs, sweeps::Layout::valve);
        std::map<std::string, int> combos;
        for (const auto& r : recs) combos[model::to_string(r.params.bath_model).data() + (" " + r.combination)]++;
        for (const auto& [k, v] : combos) err << k << ": " << v << "\n";
        summary(recs);
        return 0;
    }
    if (cmd.subcommand == "sweep-boost") {
        sweeps::BoostResult b = sweeps::boost_scan(cfg, cmd.workers);
        std::vector<sweeps::SweepRecord> recs = b.records;
        if (b.edge) {
            b.edge->flags.push_back("w_zero_edge");
            recs.push_back(*b.edge);
        }
        emit(recs, sweeps::Layout::boost);
        err << "status: " << b.status << ", " << b.records.size() << " admissible points\n";
        return 0;
    }
    if (cmd.subcommand == "validate") {
        const auto recs = sweeps::random_sweep(cfg, cmd.workers);
        bool ok = true;
        for (const auto& c : validate_records(recs)) {
            out << (c.passed() ? "PASS " : "FAIL ") << c.name << " (" << c.violations << " of "
                << c.checked << " records violate)\n";
            ok = ok && c.passed();
        }
        return ok ? 0 : 1;
    }
    throw ConfigError("unknown subcommand '" + cmd.subcommand + "'");
}

} // namespace trimachine::cli
