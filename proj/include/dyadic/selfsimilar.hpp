#pragma once

// Self-similar profile sequences a_n with Y_n(t) = a_n / (t - t_0).
//
// Two constructions:
//  * the pure-KP pull-back: a rescaled ("weak") form of the profile
//    relation is run backward from a constant top seed L; the boundary
//    value L* at which the bottom entry vanishes yields the profile.
//  * the mixed forward recursion: each interior balance solved for
//    a_{n+1}; below the critical coupling ratio every a_1 works, above it
//    a single a_1 survives and is found by parity shooting.
//
// The weak rescale and its zeta offsets are specific to beta = 1; the
// forward constructions accept general beta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dyadic/detail/profiles.hpp"
#include "dyadic/model.hpp"
#include "dyadic/ratio.hpp"

namespace dyadic {

enum class Divergence { OddUp, EvenUp, Converged };

inline const char* divergence_name(Divergence d) {
    switch (d) {
        case Divergence::OddUp: return "OddUp";
        case Divergence::EvenUp: return "EvenUp";
        case Divergence::Converged: return "Converged";
    }
    return "?";
}

// Rescaled profile sequence for the beta = 1 pull-back. values holds
// a~_0..a~_{N+1}; zeta is index-aligned (zeta[n] = offset in the relation
// linking shells n-1, n, n+1; zeta[0] unused).
struct WeakSequence {
    std::vector<double> values;
    std::vector<double> zeta;
    double start_L = 0.0;
    bool well_defined = false;
};

namespace detail {

// zeta_n for beta = 1: the inhomogeneous offset of the weak recursion,
// 2^{-(2n+2)/3}. Their sum M = 2^{-4/3} / (1 - 2^{-2/3}) bounds how far a
// backward pass can descend from its seed.
inline double weak_zeta(int n) { return std::exp2(-(2.0 * n + 2.0) / 3.0); }

inline double weak_offset_sum() { return std::exp2(-4.0 / 3.0) / (1.0 - std::exp2(-2.0 / 3.0)); }

}  // namespace detail

// Forward step of the pure-KP profile relation:
//   a_{n+1} = 2^{-beta (n+1)} + a_{n-1}^2 / (2^beta a_n).
inline double kp_forward_step(double a_prev, double a_cur, int n, double beta = 1.0) {
    if (n < 1) throw std::invalid_argument("kp_forward_step: n must be >= 1");
    if (!(a_cur > 0.0)) throw std::invalid_argument("kp_forward_step: a_cur must be > 0");
    return std::exp2(-beta * (n + 1)) + a_prev * a_prev / (std::exp2(beta) * a_cur);
}

// Weak <-> strong rescale at beta = 1: a~_n = a_n * 2^{n/3}.
inline std::vector<double> weak_from_strong(const std::vector<double>& strong) {
    std::vector<double> w(strong.size());
    for (std::size_t n = 0; n < strong.size(); ++n)
        w[n] = strong[n] * std::exp2(static_cast<double>(n) / 3.0);
    return w;
}

inline std::vector<double> strong_from_weak(const std::vector<double>& weak) {
    std::vector<double> s(weak.size());
    for (std::size_t n = 0; n < weak.size(); ++n)
        s[n] = weak[n] * std::exp2(-static_cast<double>(n) / 3.0);
    return s;
}

// Backward pass of the weak relation from the constant top seed
// a~_{N+1} = a~_N = L:  (a~_{n-1})^2 = a~_n (a~_{n+1} - zeta_n).
// A negative radicand ends the pass with well_defined = false; that
// failure is data (the boundary search below probes for it).
inline WeakSequence backward_truncated(double L, int N) {
    if (!(L > 0.0)) throw std::invalid_argument("backward_truncated: L must be > 0");
    if (N <= 2) throw std::invalid_argument("backward_truncated: N must be > 2");
    WeakSequence w;
    w.start_L = L;
    w.values.assign(static_cast<std::size_t>(N) + 2, 0.0);
    w.zeta.assign(static_cast<std::size_t>(N) + 1, 0.0);
    for (int n = 1; n <= N; ++n) w.zeta[static_cast<std::size_t>(n)] = detail::weak_zeta(n);
    w.values[static_cast<std::size_t>(N) + 1] = L;
    w.values[static_cast<std::size_t>(N)] = L;
    w.well_defined = true;
    for (int n = N; n >= 1; --n) {
        const double rad =
            w.values[static_cast<std::size_t>(n) + 1] - w.zeta[static_cast<std::size_t>(n)];
        if (rad < 0.0) {
            w.well_defined = false;
            return w;
        }
        w.values[static_cast<std::size_t>(n) - 1] =
            std::sqrt(w.values[static_cast<std::size_t>(n)] * rad);
    }
    return w;
}

// Bisection on the seed L between failing and succeeding backward passes.
// Success is monotone in L (larger seeds leave more room above the
// offsets), so the boundary is a single point; the profile at the
// succeeding endpoint has a~_0 -> 0 as tol -> 0.
inline std::pair<double, WeakSequence> find_L_star(int N, double tol) {
    if (N < 10) throw std::invalid_argument("find_L_star: N must be >= 10");
    if (!(tol > 0.0)) throw std::invalid_argument("find_L_star: tol must be > 0");
    double lo = 1e-6;
    double hi = detail::weak_offset_sum() + 1.0;
    if (backward_truncated(lo, N).well_defined)
        throw std::runtime_error("find_L_star: lower probe unexpectedly well defined");
    if (!backward_truncated(hi, N).well_defined)
        throw std::runtime_error("find_L_star: upper probe unexpectedly fails");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (backward_truncated(mid, N).well_defined)
            hi = mid;
        else
            lo = mid;
    }
    return {hi, backward_truncated(hi, N)};
}

// Classifies a candidate sequence against a reference by per-parity
// linear fits of the log deviation. Divergence off a shared profile
// alternates: one parity class grows at a positive bits-per-shell slope
// while the other shrinks. Entries where either sequence is nonpositive
// are skipped (leading zeros of profile sequences).
inline Divergence divergence_classify(const std::vector<double>& seq,
                                      const std::vector<double>& reference) {
    if (seq.size() != reference.size())
        throw std::invalid_argument("divergence_classify: length mismatch");
    if (seq.size() < 8) throw std::invalid_argument("divergence_classify: need at least 8 entries");
    const std::size_t L = seq.size();

    std::vector<double> dev(L, 0.0);
    std::vector<bool> ok(L, false);
    for (std::size_t n = 0; n < L; ++n) {
        if (seq[n] > 0.0 && reference[n] > 0.0) {
            dev[n] = std::log2(seq[n] / reference[n]);
            ok[n] = true;
        }
    }

    bool settled = true;  // last quarter inside the 0.01 band -> Converged
    for (std::size_t n = L - std::max<std::size_t>(2, L / 4); n < L; ++n)
        if (ok[n] && std::abs(dev[n]) > 0.01) settled = false;
    if (settled) return Divergence::Converged;

    // Per-parity least-squares slope over the trailing window.
    const std::size_t win = std::min(L, std::max<std::size_t>(16, L / 2));
    double slope[2];
    for (int par = 0; par < 2; ++par) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
        for (std::size_t n = L - win; n < L; ++n) {
            if (!ok[n] || static_cast<int>(n % 2) != par) continue;
            const double x = static_cast<double>(n);
            sx += x;
            sy += dev[n];
            sxx += x * x;
            sxy += x * dev[n];
            m += 1.0;
        }
        const double det = m * sxx - sx * sx;
        slope[par] = (m >= 2.0 && det != 0.0) ? (m * sxy - sx * sy) / det : 0.0;
    }
    constexpr double kAlphaMin = 0.05;  // bits per shell
    if (slope[1] >= kAlphaMin && slope[0] <= -kAlphaMin) return Divergence::OddUp;
    if (slope[0] >= kAlphaMin && slope[1] <= -kAlphaMin) return Divergence::EvenUp;
    throw std::runtime_error(
        "divergence_classify: mixed signals (neither parity pattern nor convergence); deepen the "
        "sequences");
}

// Forward step of the mixed profile relation: positive root of
//   d2 x^2 + d1 k_1 a_n x - (d1 a_{n-1}^2 + d2 a_n a_{n-1}/k_1 + a_n/k_n) = 0.
// The constant term is strictly positive for positive a_n, so exactly one
// positive root exists. At d2 = 0 this is exactly the pure-KP step.
inline double mixed_forward_step(double a_prev, double a_cur, int n, const ModelParams& p) {
    if (n < 1) throw std::invalid_argument("mixed_forward_step: n must be >= 1");
    if (!(a_cur > 0.0)) throw std::invalid_argument("mixed_forward_step: a_cur must be > 0");
    if (a_prev < 0.0) throw std::invalid_argument("mixed_forward_step: a_prev must be >= 0");
    if (p.delta2 == 0.0) return kp_forward_step(a_prev, a_cur, n, p.beta);
    const double k1 = wavenumber(p, 1);
    const double B = p.delta1 * k1 * a_cur;
    const double C =
        p.delta1 * a_prev * a_prev + p.delta2 * a_cur * a_prev / k1 + a_cur / wavenumber(p, n);
    return 2.0 * C / (B + std::sqrt(B * B + 4.0 * p.delta2 * C));
}

namespace detail {

enum class SelfSimilarBand { Below, MultiSolution, Unique, Above };

inline SelfSimilarBand selfsimilar_band(const ModelParams& p) {
    const RegimeClass rc = regime_classify(p);
    const double lo = std::exp2(-4.0 * p.beta);            // k_1^{-4}
    const double hi = std::exp2(-4.0 * p.beta / 3.0);      // k_1^{-4/3}
    if (rc.tag == RegimeTag::PureKP) return SelfSimilarBand::Above;  // ratio = +inf
    if (rc.ratio < lo) return SelfSimilarBand::Below;
    if (rc.ratio < hi) return SelfSimilarBand::MultiSolution;
    if (rc.ratio == hi) return SelfSimilarBand::Below;  // boundary: neither construction applies
    if (rc.ratio <= 1.0) return SelfSimilarBand::Unique;
    return SelfSimilarBand::Above;
}

inline NormalizedProfile selfsimilar_profile(double a1, const ModelParams& p, int depth) {
    return generate_normalized(
        [&p](double ap, double ac, int n) { return mixed_forward_step(ap, ac, n, p); }, 0.0, a1, 1,
        depth, p.beta);
}

// Rebuild amplitudes a_0..a_cut at a given a_1.
inline std::vector<double> selfsimilar_amplitudes(double a1, const ModelParams& p, int cut) {
    std::vector<double> a(static_cast<std::size_t>(cut) + 1, 0.0);
    a[1] = a1;
    for (int n = 1; n < cut; ++n)
        a[static_cast<std::size_t>(n) + 1] =
            mixed_forward_step(a[static_cast<std::size_t>(n) - 1], a[static_cast<std::size_t>(n)], n, p);
    return a;
}

inline void verify_selfsimilar_tail(const std::vector<double>& a, const ModelParams& p);

}  // namespace detail

// Forward construction in the attracting band k_1^{-4} <= d1/d2 < k_1^{-4/3},
// where every a_1 > 0 yields a bounded profile.
inline CoefficientSequence build_selfsimilar(double a1, const ModelParams& p, int depth) {
    p.validate();
    if (!(a1 > 0.0)) throw std::invalid_argument("build_selfsimilar: a1 must be > 0");
    if (depth < 4 || depth > 400)
        throw std::invalid_argument("build_selfsimilar: depth must be in [4, 400]");
    if (detail::selfsimilar_band(p) != detail::SelfSimilarBand::MultiSolution)
        throw std::invalid_argument(
            "build_selfsimilar: forward generation only converges for k_1^{-4} <= delta1/delta2 < "
            "k_1^{-4/3}; use shoot_selfsimilar in the unique band");

    CoefficientSequence seq;
    seq.kind = SequenceKind::SelfSimilar;
    seq.regime = regime_classify(p);
    seq.t_origin = -1.0;
    seq.values = detail::selfsimilar_amplitudes(a1, p, depth);

    const std::size_t L = seq.values.size();
    const double est = seq.values.back() * std::exp2(p.beta * static_cast<double>(L - 1) / 3.0);
    seq.k41_constant = est;
    return seq;
}

struct ShootResult {
    double root = 0.0;           // the surviving a_1
    double bracket_width = 0.0;  // final bisection bracket
    CoefficientSequence sequence;
    Divergence divergence_profile = Divergence::Converged;
};

namespace detail {

// Backward consistency check on accepted shooting output: re-solve each
// tail balance for the lower amplitude from the two above it and demand
// agreement, and require every consecutive ratio to stay within
// [k_1^{-2}, k_1^{2}]. Both properties characterize the tame-headed
// profile; orbit families that mimic it after a shifted start violate the
// ratio band in their first few shells.
inline void verify_selfsimilar_tail(const std::vector<double>& a, const ModelParams& p) {
    const double k1 = wavenumber(p, 1);
    const double band = k1 * k1;
    const double k1_3 = std::exp2(p.beta / 3.0);
    for (std::size_t n = 2; n < a.size(); ++n) {
        const double ratio = a[n] / a[n - 1] * k1_3;
        if (!(ratio >= 1.0 / band && ratio <= band))
            throw std::runtime_error("shoot_selfsimilar: accepted profile leaves the ratio band");
    }
    for (std::size_t n = a.size() - std::max<std::size_t>(3, a.size() / 4); n + 1 < a.size(); ++n) {
        // d1 x^2 + (d2 a_n / k_1) x - (d2 a_{n+1}^2 + d1 k_1 a_n a_{n+1} - a_n / k_n) = 0
        const double C = p.delta2 * a[n + 1] * a[n + 1] + p.delta1 * k1 * a[n] * a[n + 1] -
                         a[n] / wavenumber(p, static_cast<int>(n));
        if (!(C > 0.0))
            throw std::runtime_error("shoot_selfsimilar: tail balance has no positive back-solve");
        const double B = p.delta2 * a[n] / k1;
        const double rec = p.delta1 > 0.0
                               ? 2.0 * C / (B + std::sqrt(B * B + 4.0 * p.delta1 * C))
                               : C / B;
        if (std::abs(rec - a[n - 1]) > 1e-6 * std::max(1.0, a[n - 1]))
            throw std::runtime_error("shoot_selfsimilar: backward tail check failed");
    }
}

}  // namespace detail

// Bisection on a_1 in the repelling band k_1^{-4/3} < d1/d2 <= 1. The
// scan can show several parity flips: orbits seeded far below the
// surviving profile shadow shifted copies of it (one extra climb shell,
// doubled head ratio) before diverging. Candidates are therefore taken
// from the largest flip downward and must pass orientation (EvenUp below,
// OddUp above), a plateau-length floor, and the head/tail ratio band.
inline ShootResult shoot_selfsimilar(const ModelParams& p, int depth) {
    p.validate();
    if (depth < 4 || depth > 60)
        throw std::invalid_argument("shoot_selfsimilar: depth must be in [4, 60]");
    // Any ratio above the attracting band shoots; this includes ratios
    // beyond 1, where no uniqueness statement backs the result but the
    // same exclusion mechanism still brackets a root (the KP limit of
    // vanishing delta2 is the cross-validation case).
    const auto band = detail::selfsimilar_band(p);
    if (band != detail::SelfSimilarBand::Unique && band != detail::SelfSimilarBand::Above)
        throw std::invalid_argument(
            "shoot_selfsimilar: shooting needs delta1/delta2 > k_1^{-4/3}; use build_selfsimilar "
            "in the attracting band");

    const RatioStepParams rp = RatioStepParams::from(p);
    const int wdepth = detail::shooting_depth(ratio_fixed_point_multiplier(rp));
    const auto classify = [&](double a1) {
        return detail::classify_parity(detail::selfsimilar_profile(a1, p, wdepth));
    };

    constexpr int kScan = 64;
    const double scan_lo = 1e-4, scan_hi = 1e4;
    std::vector<double> grid(kScan + 1);
    std::vector<detail::ParityClass> cls(kScan + 1);
    for (int i = 0; i <= kScan; ++i) {
        grid[static_cast<std::size_t>(i)] =
            scan_lo * std::pow(scan_hi / scan_lo, static_cast<double>(i) / kScan);
        cls[static_cast<std::size_t>(i)] = classify(grid[static_cast<std::size_t>(i)]);
    }

    std::string rejects;
    for (int i = kScan - 1; i >= 0; --i) {
        const auto cl = cls[static_cast<std::size_t>(i)];
        const auto ch = cls[static_cast<std::size_t>(i) + 1];
        if (cl != detail::ParityClass::EvenUp || ch != detail::ParityClass::OddUp)
            continue;  // orientation: the surviving profile has EvenUp below, OddUp above
        double lo = grid[static_cast<std::size_t>(i)], hi = grid[static_cast<std::size_t>(i) + 1];
        for (int it = 0; it < 200 && (hi - lo) > 1e-13 * 0.5 * (hi + lo); ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto cm = classify(mid);
            if (cm == detail::ParityClass::EvenUp)
                lo = mid;
            else if (cm == detail::ParityClass::OddUp)
                hi = mid;
            else
                break;
        }
        const double root = 0.5 * (lo + hi);
        const detail::NormalizedProfile prof = detail::selfsimilar_profile(root, p, wdepth);
        const int pe = detail::plateau_end(prof);
        if (pe < std::min(32, (3 * wdepth) / 10)) {
            rejects += " [flip near " + std::to_string(root) + ": no plateau]";
            continue;
        }
        const int cut = std::min(pe, depth);
        std::vector<double> a = detail::selfsimilar_amplitudes(root, p, cut);
        try {
            detail::verify_selfsimilar_tail(a, p);
        } catch (const std::runtime_error& e) {
            rejects += " [flip near " + std::to_string(root) + ": " + e.what() + "]";
            continue;
        }

        ShootResult result;
        result.root = root;
        result.bracket_width = hi - lo;
        result.sequence.kind = SequenceKind::SelfSimilar;
        result.sequence.regime = regime_classify(p);
        result.sequence.t_origin = -1.0;
        result.sequence.values = std::move(a);
        const int Ncut = static_cast<int>(result.sequence.values.size()) - 1;
        result.sequence.k41_constant =
            result.sequence.values.back() * std::exp2(p.beta * Ncut / 3.0);
        // Classification of the accepted (plateau-trimmed) profile.
        std::vector<double> ref(result.sequence.values.size());
        for (std::size_t n = 0; n < ref.size(); ++n)
            ref[n] = *result.sequence.k41_constant * std::exp2(-p.beta * static_cast<double>(n) / 3.0);
        ref[0] = 0.0;
        result.divergence_profile = Divergence::Converged;
        if (result.sequence.values.size() >= 8) {
            try {
                result.divergence_profile =
                    divergence_classify(result.sequence.values, ref);
            } catch (const std::runtime_error&) {
                result.divergence_profile = Divergence::Converged;
            }
        }
        return result;
    }
    throw std::runtime_error(
        "shoot_selfsimilar: no sign change with an admissible profile in the initial scan;" +
        (rejects.empty() ? std::string(" no candidate flips found") : rejects));
}

// Growth of c_n = a_n k_n: valid profiles gain at least a fixed factor
// every two shells. monotone = every same-parity pair increases;
// M_fit = the smallest two-shell factor (> 1 on valid profiles, and at
// most k_1^2).
inline std::pair<bool, double> c_growth_check(const CoefficientSequence& seq,
                                              const ModelParams& p) {
    const auto& a = seq.values;
    if (a.size() < 4) throw std::invalid_argument("c_growth_check: need at least 4 shells");
    bool monotone = true;
    double mfit = std::numeric_limits<double>::infinity();
    for (std::size_t n = 2; n + 1 < a.size(); ++n) {
        const double c_prev = a[n - 1] * wavenumber(p, static_cast<int>(n) - 1);
        const double c_next = a[n + 1] * wavenumber(p, static_cast<int>(n) + 1);
        if (c_prev <= 0.0) continue;
        if (c_next <= c_prev) monotone = false;
        mfit = std::min(mfit, c_next / c_prev);
    }
    return {monotone, mfit};
}

}  // namespace dyadic
