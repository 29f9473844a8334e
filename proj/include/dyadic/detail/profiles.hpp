#pragma once

// Internal helpers shared by the two shooting engines (constant and
// self-similar construction): forward generation of normalized profiles
// with explicit range-exit records, and classifiers over those profiles.
//
// Everything works on t_n = log2(a_n * k_n^{1/3}), the binary log of the
// Kolmogorov-normalized amplitude. Its increments r_n = t_n - t_{n-1} are
// exactly log2 of the consecutive-ratio variable b~_n, so "ratios settle
// to 1" and "profile plateaus" are the same statement.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "dyadic/model.hpp"

namespace dyadic::detail {

// Cap (in log2 of the normalized amplitude) beyond which generation stops
// and records a directed exit. Wide enough that an exit is unambiguous
// divergence, narrow enough that squares of amplitudes stay finite.
inline constexpr double kLogCap = 320.0;

// Plateau band: |log2 b~| below this counts as "ratio at 1" (about 1%).
inline constexpr double kPlateauBand = 0.0144;

// Divergence band: a single ratio step beyond one binary order.
inline constexpr double kDivergenceBand = 1.0;

struct NormalizedProfile {
    std::vector<double> log2_tilde;  // t at shells first_shell, first_shell+1, ...
    int first_shell = 1;
    int exit_shell = -1;  // shell whose value left the representable band, -1 if none
    int exit_dir = 0;     // +1 grew past the cap, -1 collapsed below it

    int last_shell() const {
        return first_shell + static_cast<int>(log2_tilde.size()) - 1;
    }
};

// Generate a_{n+1} = step(a_{n-1}, a_n, n) from the seed pair
// (a_prev at first_shell-1, a_cur at first_shell), recording normalized
// logs until `depth` steps or a range exit. A nonpositive or non-finite
// iterate counts as a downward exit: all steps used here produce positive
// values in exact arithmetic, so hitting zero is a collapse.
template <class Step>
NormalizedProfile generate_normalized(Step&& step, double a_prev, double a_cur, int first_shell,
                                      int depth, double beta) {
    NormalizedProfile prof;
    prof.first_shell = first_shell;
    prof.log2_tilde.reserve(static_cast<std::size_t>(depth) + 1);
    prof.log2_tilde.push_back(std::log2(a_cur) + beta * first_shell / 3.0);
    double ap = a_prev, ac = a_cur;
    for (int n = first_shell; n < first_shell + depth; ++n) {
        const double an1 = step(ap, ac, n);
        if (!std::isfinite(an1) || an1 <= 0.0) {
            prof.exit_shell = n + 1;
            prof.exit_dir = -1;
            return prof;
        }
        const double t = std::log2(an1) + beta * (n + 1) / 3.0;
        if (t > kLogCap || t < -kLogCap) {
            prof.exit_shell = n + 1;
            prof.exit_dir = t > 0.0 ? +1 : -1;
            return prof;
        }
        prof.log2_tilde.push_back(t);
        ap = ac;
        ac = an1;
    }
    return prof;
}

// Last shell whose incoming ratio sits inside the plateau band (0 if the
// profile never plateaus). Divergence past this point is untrimmed noise.
inline int plateau_end(const NormalizedProfile& p) {
    int best = 0;
    for (std::size_t i = 1; i < p.log2_tilde.size(); ++i)
        if (std::abs(p.log2_tilde[i] - p.log2_tilde[i - 1]) <= kPlateauBand)
            best = p.first_shell + static_cast<int>(i);
    return best;
}

enum class ParityClass { EvenUp, OddUp, Converged, Indeterminate };

// Parity classifier for self-similar shooting. Divergence off the
// Kolmogorov ray alternates shell to shell (the ratio map's multiplier is
// negative), so the sign and shell parity of the last beyond-band ratio
// step identify which parity class grows. A generation exit counts as
// such a step at the exit shell.
inline ParityClass classify_parity(const NormalizedProfile& p) {
    const auto& t = p.log2_tilde;
    int big_shell = 0;
    double big_r = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double r = t[i] - t[i - 1];
        if (std::abs(r) > kDivergenceBand) {
            big_shell = p.first_shell + static_cast<int>(i);
            big_r = r;
        }
    }
    if (p.exit_shell >= 0) {
        big_shell = p.exit_shell;
        big_r = p.exit_dir * 2.0 * kDivergenceBand;
    }
    // Ignore beyond-band steps in the first few shells unless generation
    // actually exited: seeds far below the ray open with huge ratios that
    // say nothing about the asymptotic parity.
    if (big_shell > 0 && (p.exit_shell >= 0 || big_shell > p.first_shell + 4)) {
        const int up_shell = big_r > 0.0 ? big_shell : big_shell - 1;
        return up_shell % 2 == 0 ? ParityClass::EvenUp : ParityClass::OddUp;
    }
    const std::size_t m = t.size();
    if (m >= 9) {
        const std::size_t win = std::max<std::size_t>(4, (m - 1) / 4);
        bool flat = true;
        for (std::size_t i = m - win; i < m; ++i)
            if (std::abs(t[i] - t[i - 1]) > kPlateauBand) flat = false;
        if (flat) return ParityClass::Converged;
    }
    return ParityClass::Indeterminate;
}

enum class BandClass { Up, Collapse, Bounded };

// Median-band classifier for constant-solution shooting: a candidate
// diverges upward when the normalized amplitude exceeds 10x the median of
// its trailing window, collapses when it drops below 0.1x (or the iterate
// turns nonpositive). The window median tracks the plateau, so the first
// crossing fires while the reference is still meaningful.
inline BandClass classify_median_band(const NormalizedProfile& p) {
    const auto& t = p.log2_tilde;
    const double logband = std::log2(10.0);
    std::vector<double> win;
    for (std::size_t n = 8; n < t.size(); ++n) {
        win.assign(t.begin() + static_cast<std::ptrdiff_t>(n / 2),
                   t.begin() + static_cast<std::ptrdiff_t>(n));
        std::nth_element(win.begin(), win.begin() + static_cast<std::ptrdiff_t>(win.size() / 2),
                         win.end());
        const double med = win[win.size() / 2];
        if (t[n] > med + logband) return BandClass::Up;
        if (t[n] < med - logband) return BandClass::Collapse;
    }
    if (p.exit_shell >= 0) return p.exit_dir > 0 ? BandClass::Up : BandClass::Collapse;
    return BandClass::Bounded;
}

// Working depth for shooting engines: deep enough that a bracket at
// relative width 1e-13 still shows visible divergence past the plateau.
// The requested output depth only truncates the returned sequence.
inline int shooting_depth(double multiplier) {
    if (!(multiplier > 1.0 + 1e-9)) return 800;
    const double shells = (43.2 + 10.0) / std::log2(multiplier) + 24.0;
    return std::clamp(static_cast<int>(std::ceil(shells)), 64, 800);
}

}  // namespace dyadic::detail
