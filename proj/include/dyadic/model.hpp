#pragma once

// Core types and pure functions for the mixed dyadic shell model
//
//   dY_n/dt = d1 * (k_n Y_{n-1}^2 - k_{n+1} Y_n Y_{n+1})
//           - d2 * (k_n Y_{n+1}^2 - k_{n-1} Y_n Y_{n-1})       (n >= 1)
//   dY_0/dt = -d1 * k_1 Y_0 Y_1 - d2 * Y_1^2 + F
//
// with k_n = 2^(beta n). The truncation imposes Y_{N+1} = 0, which keeps
// the quadratic exchange terms telescoping, so the unforced truncated
// system conserves energy exactly (not just approximately).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyadic {

struct ModelParams {
    double beta = 1.0;     // wavenumber growth exponent, k_n = 2^(beta n)
    double delta1 = 1.0;   // forward-transfer family weight
    double delta2 = 1.0;   // backward-transfer family weight
    double forcing = 0.0;  // constant force on shell 0
    int n_shells = 40;     // truncation index N; state is Y_0..Y_N

    void validate() const {
        if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
        if (delta1 < 0.0 || delta2 < 0.0)
            throw std::invalid_argument("ModelParams: delta1/delta2 must be >= 0");
        if (forcing < 0.0) throw std::invalid_argument("ModelParams: forcing must be >= 0");
        if (n_shells < 2) throw std::invalid_argument("ModelParams: n_shells must be >= 2");
    }
};

// k_n = 2^(beta n); n may be any integer (k_{-1} never multiplies a
// nonzero value but is well defined).
inline double wavenumber(const ModelParams& p, int n) {
    return std::exp2(p.beta * static_cast<double>(n));
}

struct ShellField {
    double time = 0.0;
    std::vector<double> values;  // Y_0..Y_N, length n_shells + 1

    void validate(const ModelParams& p) const {
        if (values.size() != static_cast<std::size_t>(p.n_shells) + 1)
            throw std::invalid_argument("ShellField: expected n_shells+1 values");
        for (double v : values)
            if (!std::isfinite(v)) throw std::invalid_argument("ShellField: non-finite value");
    }
};

enum class SequenceKind { Constant, SelfSimilar };

enum class RegimeTag {
    PureKP,                  // d2 = 0
    PureObukhov,             // d1 = 0
    ObukhovDominant,         // d1/d2 < k_1^{-4/3}
    CriticalRatio,           // d1/d2 = k_1^{-4/3}
    KPDominant,              // k_1^{-4/3} < d1/d2 <= 1
    OutsideSelfSimilarBand,  // d1/d2 > 1
};

struct RegimeClass {
    RegimeTag tag = RegimeTag::CriticalRatio;
    double ratio = 0.0;  // d1/d2 (infinity for PureKP)
};

inline const char* regime_name(RegimeTag t) {
    switch (t) {
        case RegimeTag::PureKP: return "PureKP";
        case RegimeTag::PureObukhov: return "PureObukhov";
        case RegimeTag::ObukhovDominant: return "ObukhovDominant";
        case RegimeTag::CriticalRatio: return "CriticalRatio";
        case RegimeTag::KPDominant: return "KPDominant";
        case RegimeTag::OutsideSelfSimilarBand: return "OutsideSelfSimilarBand";
    }
    return "?";
}

inline RegimeClass regime_classify(const ModelParams& p) {
    if (p.delta1 == 0.0 && p.delta2 == 0.0)
        throw std::invalid_argument("regime_classify: delta1 = delta2 = 0 has no transfer terms");
    if (p.delta2 == 0.0)
        return {RegimeTag::PureKP, std::numeric_limits<double>::infinity()};
    if (p.delta1 == 0.0) return {RegimeTag::PureObukhov, 0.0};
    const double r = p.delta1 / p.delta2;
    const double lower = std::exp2(-4.0 * p.beta / 3.0);  // k_1^{-4/3}
    if (r < lower) return {RegimeTag::ObukhovDominant, r};
    if (r == lower) return {RegimeTag::CriticalRatio, r};
    if (r <= 1.0) return {RegimeTag::KPDominant, r};
    return {RegimeTag::OutsideSelfSimilarBand, r};
}

// Stationary / self-similar coefficient sequences a_0..a_N.
struct CoefficientSequence {
    std::vector<double> values;  // a_0..a_N, all >= 0
    SequenceKind kind = SequenceKind::Constant;
    RegimeClass regime;
    std::optional<double> k41_constant;  // plateau of a_n * k_n^{1/3}, > 0
    std::optional<double> t_origin;      // SelfSimilar only, < 0

    void validate() const {
        for (double v : values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("CoefficientSequence: values must be finite and >= 0");
        if (k41_constant && !(*k41_constant > 0.0))
            throw std::invalid_argument("CoefficientSequence: k41_constant must be > 0");
        if (kind == SequenceKind::SelfSimilar) {
            if (t_origin && !(*t_origin < 0.0))
                throw std::invalid_argument("CoefficientSequence: t_origin must be < 0");
            if (!values.empty() && values[0] != 0.0)
                throw std::invalid_argument("CoefficientSequence: self-similar sequences pin a_0 = 0");
        }
    }
};

enum class RatioDirection { Forward, Backward };

// Normalized consecutive ratios b~_n = (a_n / a_{n-1}) * k_1^{1/3}, n = 1..N.
struct RatioSequence {
    std::vector<double> values;
    RatioDirection direction = RatioDirection::Forward;

    void validate() const {
        for (double v : values)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("RatioSequence: ratios must be finite and > 0");
    }
};

// Right-hand side of the truncated system at the field's own time.
inline ShellField rhs(const ShellField& y, const ModelParams& p) {
    y.validate(p);
    const int N = p.n_shells;
    ShellField out;
    out.time = y.time;
    out.values.assign(static_cast<std::size_t>(N) + 1, 0.0);
    const auto& Y = y.values;
    out.values[0] = -p.delta1 * wavenumber(p, 1) * Y[0] * Y[1] - p.delta2 * Y[1] * Y[1] + p.forcing;
    for (int n = 1; n <= N; ++n) {
        const double ym = Y[static_cast<std::size_t>(n) - 1];
        const double yc = Y[static_cast<std::size_t>(n)];
        const double yp = (n == N) ? 0.0 : Y[static_cast<std::size_t>(n) + 1];
        const double kn = wavenumber(p, n);
        const double kp = wavenumber(p, n + 1);
        const double km = wavenumber(p, n - 1);
        out.values[static_cast<std::size_t>(n)] =
            p.delta1 * (kn * ym * ym - kp * yc * yp) - p.delta2 * (kn * yp * yp - km * yc * ym);
    }
    return out;
}

inline double energy(const ShellField& y) {
    double e = 0.0;
    for (double v : y.values) e += v * v;
    return e;
}

// H^s norm squared: sum of 2^(2 s n) Y_n^2. Overflow saturates instead of
// throwing so that blow-up probes can compare against any finite threshold.
inline double sobolev_norm_sq(const ShellField& y, double s) {
    double acc = 0.0;
    for (std::size_t n = 0; n < y.values.size(); ++n) {
        const double term = std::exp2(2.0 * s * static_cast<double>(n)) * y.values[n] * y.values[n];
        acc += term;
        if (!std::isfinite(acc)) return std::numeric_limits<double>::max();
    }
    return acc;
}

// Residual of the time-independent balance. Component 0 is the forcing
// relation d1 k_1 a_0 a_1 + d2 a_1^2 - F; component n (1 <= n <= N-1) is
// the interior exchange balance. The top shell has no component: its
// balance is severed by the truncation.
inline std::vector<double> stationary_residual(const CoefficientSequence& seq,
                                               const ModelParams& p) {
    if (seq.kind != SequenceKind::Constant)
        throw std::invalid_argument("stationary_residual: sequence kind must be Constant");
    const auto& a = seq.values;
    const int N = static_cast<int>(a.size()) - 1;
    std::vector<double> res(static_cast<std::size_t>(N > 0 ? N : 0), 0.0);
    if (N < 1) return res;
    res[0] = p.delta1 * wavenumber(p, 1) * a[0] * a[1] + p.delta2 * a[1] * a[1] - p.forcing;
    for (int n = 1; n <= N - 1; ++n) {
        const double am = a[static_cast<std::size_t>(n) - 1];
        const double ac = a[static_cast<std::size_t>(n)];
        const double ap = a[static_cast<std::size_t>(n) + 1];
        res[static_cast<std::size_t>(n)] =
            p.delta1 * (wavenumber(p, n) * am * am - wavenumber(p, n + 1) * ac * ap) -
            p.delta2 * (wavenumber(p, n) * ap * ap - wavenumber(p, n - 1) * ac * am);
    }
    return res;
}

// Residual of the self-similar profile relations. Component n
// (1 <= n <= N-1) is a_n/k_n + d1 (a_{n-1}^2 - k_1 a_n a_{n+1})
//                           - d2 (a_{n+1}^2 - k_1^{-1} a_n a_{n-1}).
// Component 0 is kept as an index-aligned zero: with a_0 = 0 the shell-0
// equation degenerates and these profiles are sequence-level objects.
inline std::vector<double> selfsimilar_residual(const CoefficientSequence& seq,
                                                const ModelParams& p) {
    if (seq.kind != SequenceKind::SelfSimilar)
        throw std::invalid_argument("selfsimilar_residual: sequence kind must be SelfSimilar");
    if (!seq.values.empty() && seq.values[0] != 0.0)
        throw std::invalid_argument("selfsimilar_residual: values[0] must be 0");
    const auto& a = seq.values;
    const int N = static_cast<int>(a.size()) - 1;
    std::vector<double> res(static_cast<std::size_t>(N > 0 ? N : 0), 0.0);
    const double k1 = wavenumber(p, 1);
    for (int n = 1; n <= N - 1; ++n) {
        const double am = a[static_cast<std::size_t>(n) - 1];
        const double ac = a[static_cast<std::size_t>(n)];
        const double ap = a[static_cast<std::size_t>(n) + 1];
        res[static_cast<std::size_t>(n)] = ac / wavenumber(p, n) +
                                           p.delta1 * (am * am - k1 * ac * ap) -
                                           p.delta2 * (ap * ap - ac * am / k1);
    }
    return res;
}

}  // namespace dyadic
