#pragma once

// CSV and JSON output. All floating-point text uses 17 significant
// digits (round-trip exact for 64-bit doubles), so identical inputs
// produce bit-identical files.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/model.hpp"
#include "dyadic/ode.hpp"

namespace dyadic {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace detail

// Coefficient sequences: constant solutions carry (n, k_n, a_n, a~_n);
// self-similar ones add the normalized ratio b~_n = (a_n/a_{n-1}) k_1^{1/3}
// and eps_n = 1/(a_n k_n). Cells whose value is undefined (ratios at the
// leading zero block, eps at a_n = 0) stay empty.
inline void write_sequence_csv(const std::string& path, const CoefficientSequence& seq,
                               const ModelParams& p) {
    seq.validate();
    std::ofstream out = detail::open_output(path);
    const bool selfsim = seq.kind == SequenceKind::SelfSimilar;
    out << (selfsim ? "n,a_n,a_tilde_n,b_tilde_n,eps_n" : "n,k_n,a_n,a_tilde_n") << "\n";
    const double k1_3 = std::exp2(p.beta / 3.0);
    for (std::size_t n = 0; n < seq.values.size(); ++n) {
        const double kn = wavenumber(p, static_cast<int>(n));
        const double a = seq.values[n];
        const double at = a * std::exp2(p.beta * static_cast<double>(n) / 3.0);
        if (!selfsim) {
            out << n << ',' << format_double(kn) << ',' << format_double(a) << ','
                << format_double(at) << "\n";
            continue;
        }
        out << n << ',' << format_double(a) << ',' << format_double(at) << ',';
        if (n >= 1 && seq.values[n - 1] > 0.0) out << format_double(a / seq.values[n - 1] * k1_3);
        out << ',';
        if (a > 0.0) out << format_double(1.0 / (a * kn));
        out << "\n";
    }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = detail::open_output(path);
    out << "t";
    for (int n = 0; n <= traj.params.n_shells; ++n) out << ",Y_" << n;
    out << "\n";
    for (const ShellField& f : traj.samples) {
        out << format_double(f.time);
        for (double v : f.values) out << ',' << format_double(v);
        out << "\n";
    }
}

inline nlohmann::json params_json(const ModelParams& p) {
    return {{"beta", p.beta},       {"delta1", p.delta1},   {"delta2", p.delta2},
            {"forcing", p.forcing}, {"n_shells", p.n_shells}};
}

// Manifest skeleton shared by all commands; results/stats are filled by
// the caller. The timestamp is the only wall-clock content any command
// writes.
inline nlohmann::json manifest_json(const std::string& command, const ModelParams& p,
                                    const std::string& timestamp) {
    nlohmann::json m;
    m["command"] = command;
    m["params"] = params_json(p);
    m["derived"] = {{"k1", wavenumber(p, 1)},
                    {"thresholds",
                     {{"lower", std::exp2(-4.0 * p.beta)},
                      {"critical", std::exp2(-4.0 * p.beta / 3.0)},
                      {"unit", 1.0}}}};
    m["results"] = nlohmann::json::object();
    m["stats"] = nlohmann::json::object();
    m["timestamp"] = timestamp;
    return m;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out = detail::open_output(path);
    out << j.dump(2) << "\n";
}

}  // namespace dyadic
