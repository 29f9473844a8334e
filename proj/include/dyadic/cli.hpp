#pragma once

// Front-end logic for the `dyadic` binary, kept separate from the
// argument parser so configuration handling and command dispatch are
// testable in-process: flat key=value config files, flag precedence,
// per-command option vetting, and run().

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/io.hpp"
#include "dyadic/model.hpp"
#include "dyadic/ode.hpp"
#include "dyadic/selfsimilar.hpp"
#include "dyadic/stationary.hpp"
#include "dyadic/sweep.hpp"
#include "dyadic/verify.hpp"

namespace dyadic::cli {

enum class Command { Simulate, Constant, SelfSimilar, Sweep, Verify };

inline const char* command_name(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::Constant: return "constant";
        case Command::SelfSimilar: return "selfsimilar";
        case Command::Sweep: return "sweep";
        case Command::Verify: return "verify";
    }
    return "?";
}

// Configuration problems are reported with this type so the entry point
// can map them to exit status 2 (vs. 1 for computation failures).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { CSV, JSON };

struct RunConfig {
    Command command = Command::Verify;
    ModelParams params;               // defaults: beta 1, deltas 1, F 0, N 40
    std::string output_path;          // empty = "<command>.<format>"
    Format format = Format::CSV;
    std::optional<double> t_end;      // simulate horizon (default 1); sweep blow-up probe when set
    double rel_tol = 1e-10;
    double a0 = 1.0;                  // constant-family seed / simulate data scale
    double a1 = 1.0;                  // self-similar family seed
    SweepGrid grid;
    int workers = 4;
};

// One parsed config entry: value plus the line it came from, for
// line-precise error messages.
struct ConfigEntry {
    std::string value;
    int line = 0;  // 0 = set by a flag
};

using ConfigMap = std::map<std::string, ConfigEntry>;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {"beta",    "delta1", "delta2", "forcing",
                                                  "shells",  "out",    "format", "t_end",
                                                  "rel_tol", "a0",     "a1",     "grid",
                                                  "workers"};
    return keys;
}

// Keys that are meaningful for each command; anything else present in
// the config or on the command line is rejected as contradictory.
inline std::vector<std::string> allowed_keys(Command c) {
    switch (c) {
        case Command::Simulate:
            return {"beta", "delta1", "delta2", "forcing", "shells",
                    "rel_tol", "t_end", "a0", "out", "format"};
        case Command::Constant:
            return {"beta", "delta1", "delta2", "forcing", "shells", "a0", "out", "format"};
        case Command::SelfSimilar:
            return {"beta", "delta1", "delta2", "shells", "a1", "out", "format"};
        case Command::Sweep:
            return {"beta", "forcing", "shells", "grid", "workers",
                    "t_end", "a0", "a1", "out", "format"};
        case Command::Verify:
            return {};
    }
    return {};
}

inline std::string where(const std::string& key, const ConfigEntry& e) {
    if (e.line > 0) return "config line " + std::to_string(e.line) + ", key '" + key + "'";
    return "option '" + key + "'";
}

inline double to_double(const std::string& key, const ConfigEntry& e) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where(key, e) + ": not a number: '" + e.value + "'");
    }
}

inline int to_int(const std::string& key, const ConfigEntry& e) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where(key, e) + ": not an integer: '" + e.value + "'");
    }
}

// Grid spec format: d1lo:d1hi:n,d2lo:d2hi:n
inline SweepGrid to_grid(const std::string& key, const ConfigEntry& e) {
    SweepGrid g;
    const auto parse_axis = [&](const std::string& axis, double& lo, double& hi, int& count) {
        std::istringstream is(axis);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(is, part, ':')) parts.push_back(part);
        if (parts.size() != 3)
            throw ConfigError(where(key, e) + ": axis must be lo:hi:count, got '" + axis + "'");
        lo = to_double(key, ConfigEntry{parts[0], e.line});
        hi = to_double(key, ConfigEntry{parts[1], e.line});
        count = to_int(key, ConfigEntry{parts[2], e.line});
    };
    const std::size_t comma = e.value.find(',');
    if (comma == std::string::npos)
        throw ConfigError(where(key, e) + ": expected two axes separated by ','");
    parse_axis(e.value.substr(0, comma), g.d1_lo, g.d1_hi, g.d1_count);
    parse_axis(e.value.substr(comma + 1), g.d2_lo, g.d2_hi, g.d2_count);
    try {
        g.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(where(key, e) + ": " + ex.what());
    }
    return g;
}

inline std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string manifest_path(const std::string& output_path) {
    std::filesystem::path p(output_path);
    p.replace_extension(".manifest.json");
    return p.string();
}

}  // namespace detail

// Reads a flat key = value file. '#' starts a comment; blank lines are
// skipped; keys must be known and unique.
inline ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + body + "'");
        const std::string key = detail::trim(body.substr(0, eq));
        const std::string value = detail::trim(body.substr(eq + 1));
        const auto& known = detail::known_keys();
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key '" + key +
                              "' has no value");
        if (!out.emplace(key, ConfigEntry{value, lineno}).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
    }
    return out;
}

// Merges file values and flag values (flags win), vets keys against the
// command, converts, and validates. Flag entries use line 0.
inline RunConfig build_config(Command command, const ConfigMap& file_values,
                              const ConfigMap& flag_values) {
    ConfigMap merged = file_values;
    for (const auto& [k, v] : flag_values) merged[k] = v;

    const std::vector<std::string> allowed = detail::allowed_keys(command);
    for (const auto& [k, v] : merged)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError(detail::where(k, v) + " does not apply to command '" +
                              std::string(command_name(command)) + "'");

    RunConfig cfg;
    cfg.command = command;
    for (const auto& [k, e] : merged) {
        if (k == "beta") cfg.params.beta = detail::to_double(k, e);
        else if (k == "delta1") cfg.params.delta1 = detail::to_double(k, e);
        else if (k == "delta2") cfg.params.delta2 = detail::to_double(k, e);
        else if (k == "forcing") cfg.params.forcing = detail::to_double(k, e);
        else if (k == "shells") cfg.params.n_shells = detail::to_int(k, e);
        else if (k == "out") cfg.output_path = e.value;
        else if (k == "format") {
            if (e.value == "csv") cfg.format = Format::CSV;
            else if (e.value == "json") cfg.format = Format::JSON;
            else throw ConfigError(detail::where(k, e) + ": must be 'csv' or 'json'");
        } else if (k == "t_end") cfg.t_end = detail::to_double(k, e);
        else if (k == "rel_tol") cfg.rel_tol = detail::to_double(k, e);
        else if (k == "a0") cfg.a0 = detail::to_double(k, e);
        else if (k == "a1") cfg.a1 = detail::to_double(k, e);
        else if (k == "grid") cfg.grid = detail::to_grid(k, e);
        else if (k == "workers") cfg.workers = detail::to_int(k, e);
    }

    try {
        cfg.params.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("invalid parameters: ") + ex.what());
    }
    if (cfg.t_end && !(*cfg.t_end > 0.0)) throw ConfigError("option 't_end': must be > 0");
    if (!(cfg.rel_tol > 0.0)) throw ConfigError("option 'rel_tol': must be > 0");
    if (!(cfg.a0 > 0.0)) throw ConfigError("option 'a0': must be > 0");
    if (!(cfg.a1 > 0.0)) throw ConfigError("option 'a1': must be > 0");
    if (cfg.workers < 1) throw ConfigError("option 'workers': must be >= 1");
    if (command == Command::Constant && !(cfg.params.forcing > 0.0))
        throw ConfigError("command 'constant' requires forcing > 0");
    if (cfg.output_path.empty())
        cfg.output_path = std::string(command_name(command)) +
                          (cfg.format == Format::CSV ? ".csv" : ".json");
    return cfg;
}

namespace detail {

inline nlohmann::json sequence_results(const CoefficientSequence& seq, const ModelParams& p) {
    nlohmann::json res;
    res["regime"] = regime_name(seq.regime.tag);
    res["values"] = seq.values;
    std::vector<double> tilde(seq.values.size());
    for (std::size_t n = 0; n < seq.values.size(); ++n)
        tilde[n] = seq.values[n] * std::exp2(p.beta * static_cast<double>(n) / 3.0);
    res["values_rescaled"] = tilde;
    if (seq.k41_constant) res["k41_constant"] = *seq.k41_constant;
    if (seq.t_origin) res["t_origin"] = *seq.t_origin;
    return res;
}

inline int run_simulate(const RunConfig& cfg) {
    ShellField f;
    f.values.resize(static_cast<std::size_t>(cfg.params.n_shells) + 1);
    for (int n = 0; n <= cfg.params.n_shells; ++n)
        f.values[static_cast<std::size_t>(n)] =
            cfg.a0 * std::exp2(-cfg.params.beta * static_cast<double>(n));
    const double t_end = cfg.t_end.value_or(1.0);
    const Trajectory traj = integrate(f, cfg.params, t_end, cfg.rel_tol, 1e-14, 201);

    nlohmann::json m = manifest_json("simulate", cfg.params, timestamp_utc());
    m["results"] = {{"t_end", t_end},
                    {"completed", traj.completed},
                    {"energy_initial", energy(traj.samples.front())},
                    {"energy_final", energy(traj.samples.back())},
                    {"samples", traj.samples.size()}};
    m["stats"] = {{"steps_accepted", traj.stats.steps_accepted},
                  {"steps_rejected", traj.stats.steps_rejected},
                  {"min_step", traj.stats.min_step}};

    if (cfg.format == Format::CSV) {
        write_trajectory_csv(cfg.output_path, traj);
        write_json(manifest_path(cfg.output_path), m);
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const ShellField& s : traj.samples) {
            nlohmann::json row;
            row["t"] = s.time;
            row["Y"] = s.values;
            rows.push_back(std::move(row));
        }
        m["results"]["trajectory"] = std::move(rows);
        write_json(cfg.output_path, m);
    }
    if (!traj.completed) {
        std::cerr << "error: integration stalled before t_end (stiffness floor); partial "
                     "trajectory written\n";
        return 1;
    }
    return 0;
}

inline int run_constant(const RunConfig& cfg) {
    const RegimeClass rc = regime_classify(cfg.params);
    CoefficientSequence seq;
    if (rc.tag == RegimeTag::ObukhovDominant || rc.tag == RegimeTag::PureObukhov)
        seq = build_constant_solution(cfg.a0, cfg.params);
    else
        seq = find_unique_constant(cfg.params, std::min(cfg.params.n_shells, 60));

    nlohmann::json m = manifest_json("constant", cfg.params, timestamp_utc());
    m["results"] = sequence_results(seq, cfg.params);
    if (cfg.format == Format::CSV) {
        write_sequence_csv(cfg.output_path, seq, cfg.params);
        write_json(manifest_path(cfg.output_path), m);
    } else {
        write_json(cfg.output_path, m);
    }
    return 0;
}

inline int run_selfsimilar(const RunConfig& cfg) {
    const auto band = dyadic::detail::selfsimilar_band(cfg.params);
    CoefficientSequence seq;
    nlohmann::json m = manifest_json("selfsimilar", cfg.params, timestamp_utc());
    if (band == dyadic::detail::SelfSimilarBand::MultiSolution) {
        seq = build_selfsimilar(cfg.a1, cfg.params, cfg.params.n_shells);
        m["results"] = sequence_results(seq, cfg.params);
        m["results"]["construction"] = "forward-family";
    } else if (band == dyadic::detail::SelfSimilarBand::Unique ||
               band == dyadic::detail::SelfSimilarBand::Above) {
        const ShootResult sr = shoot_selfsimilar(cfg.params, std::min(cfg.params.n_shells, 60));
        seq = sr.sequence;
        m["results"] = sequence_results(seq, cfg.params);
        m["results"]["construction"] = "shooting";
        m["results"]["root"] = sr.root;
        m["results"]["bracket_width"] = sr.bracket_width;
        m["results"]["divergence"] = divergence_name(sr.divergence_profile);
    } else {
        throw std::runtime_error(
            "no self-similar construction applies: delta1/delta2 is below k_1^{-4} or exactly at "
            "the critical ratio");
    }

    if (cfg.format == Format::CSV) {
        write_sequence_csv(cfg.output_path, seq, cfg.params);
        write_json(manifest_path(cfg.output_path), m);
    } else {
        write_json(cfg.output_path, m);
    }
    return 0;
}

inline int run_sweep_command(const RunConfig& cfg) {
    const std::vector<SweepRecord> records = run_sweep(cfg.grid, cfg.params, cfg.a0, cfg.a1,
                                                       cfg.t_end.value_or(0.0), cfg.workers);
    std::size_t n_constant = 0;
    std::size_t n_selfsimilar = 0;
    std::size_t n_blowup = 0;
    for (const SweepRecord& rec : records) {
        if (rec.constant_found) ++n_constant;
        if (rec.selfsimilar_found) ++n_selfsimilar;
        if (rec.blowup_time) ++n_blowup;
    }
    nlohmann::json m = manifest_json("sweep", cfg.params, timestamp_utc());
    m["results"] = {{"rows", records.size()},
                    {"constant_found", n_constant},
                    {"selfsimilar_found", n_selfsimilar},
                    {"blowups_detected", n_blowup}};
    if (cfg.format == Format::CSV) {
        write_sweep_csv(cfg.output_path, records);
        write_json(manifest_path(cfg.output_path), m);
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (const SweepRecord& rec : records) {
            nlohmann::json row;
            row["delta1"] = rec.delta1;
            row["delta2"] = rec.delta2;
            row["ratio"] = rec.ratio;
            row["regime"] = regime_name(rec.regime);
            row["constant_found"] = rec.constant_found;
            row["selfsimilar_found"] = rec.selfsimilar_found;
            if (rec.k41_constant) row["k41_constant"] = *rec.k41_constant;
            if (rec.shoot_root) row["shoot_root"] = *rec.shoot_root;
            if (rec.blowup_time) row["blowup_time"] = *rec.blowup_time;
            rows.push_back(std::move(row));
        }
        m["results"]["records"] = std::move(rows);
        write_json(cfg.output_path, m);
    }
    return 0;
}

inline int run_verify() {
    const std::vector<verify::CheckResult> results = verify::run_all();
    int passed = 0;
    for (const verify::CheckResult& res : results) {
        std::cout << (res.passed ? "PASS" : "FAIL") << "  " << res.name << ": " << res.detail
                  << "\n";
        if (res.passed) ++passed;
    }
    std::cout << passed << "/" << results.size() << " checks passed\n";
    return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace detail

// Dispatches a validated config. Computation failures surface as exit
// status 1 with the inner message on stderr.
inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::Simulate: return detail::run_simulate(cfg);
            case Command::Constant: return detail::run_constant(cfg);
            case Command::SelfSimilar: return detail::run_selfsimilar(cfg);
            case Command::Sweep: return detail::run_sweep_command(cfg);
            case Command::Verify: return detail::run_verify();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace dyadic::cli
