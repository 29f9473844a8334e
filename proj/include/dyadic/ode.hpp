#pragma once

// Time integration of the shell system and trajectory diagnostics.
//
// The integrator is an embedded Dormand-Prince 5(4) pair with FSAL and a
// standard step controller. It is deliberately self-contained: orbits
// here either stay smooth (bounded data) or steepen toward a finite-time
// singularity, in which case the step collapses and the run reports a
// truncated trajectory instead of silently looping.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

struct IntegratorStats {
    long steps_accepted = 0;
    long steps_rejected = 0;
    double min_step = std::numeric_limits<double>::infinity();
};

struct Trajectory {
    ModelParams params;
    std::vector<ShellField> samples;  // uniform in time, first = initial state
    IntegratorStats stats;
    bool completed = true;  // false when the step size collapsed before t_end
};

namespace detail {

// Allocation-free right-hand side with a precomputed wavenumber table;
// algebraically identical to rhs() in model.hpp, which stays the
// validating reference form.
class FastRhs {
public:
    explicit FastRhs(const ModelParams& p)
        : d1_(p.delta1), d2_(p.delta2), forcing_(p.forcing), N_(p.n_shells) {
        k_.resize(static_cast<std::size_t>(N_) + 2);
        for (int n = 0; n <= N_ + 1; ++n) k_[static_cast<std::size_t>(n)] = wavenumber(p, n);
    }

    void operator()(const std::vector<double>& Y, std::vector<double>& out) const {
        out[0] = -d1_ * k_[1] * Y[0] * Y[1] - d2_ * Y[1] * Y[1] + forcing_;
        for (int n = 1; n <= N_; ++n) {
            const std::size_t i = static_cast<std::size_t>(n);
            const double ym = Y[i - 1];
            const double yc = Y[i];
            const double yp = (n == N_) ? 0.0 : Y[i + 1];
            out[i] = d1_ * (k_[i] * ym * ym - k_[i + 1] * yc * yp) -
                     d2_ * (k_[i] * yp * yp - k_[i - 1] * yc * ym);
        }
    }

private:
    double d1_, d2_, forcing_;
    int N_;
    std::vector<double> k_;
};

// Dormand-Prince 5(4) coefficients.
struct DP45 {
    static constexpr std::array<double, 7> c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr std::array<std::array<double, 6>, 7> a = {{
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    }};
    static constexpr std::array<double, 7> b5 = {
        35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
    static constexpr std::array<double, 7> b4 = {
        5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
        -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

// One adaptive integrator; step() advances by at most h_cap and reports
// whether the controller could make progress. FSAL: stage 7 of an
// accepted step seeds stage 1 of the next.
class Stepper {
public:
    Stepper(const ModelParams& p, std::vector<double> y0, double t0, double rel_tol,
            double abs_tol)
        : f_(p), y_(std::move(y0)), t_(t0), rel_(rel_tol), abs_(abs_tol) {
        const std::size_t m = y_.size();
        for (auto& ki : k_) ki.assign(m, 0.0);
        stage_.assign(m, 0.0);
        y_new_.assign(m, 0.0);
        f_(y_, k_[0]);
        h_ = 1e-4;
    }

    double t() const { return t_; }
    const std::vector<double>& y() const { return y_; }
    const IntegratorStats& stats() const { return stats_; }

    // Advance by one accepted step of size <= h_cap. Returns false when
    // the controller collapses below min_h.
    bool step(double h_cap, double min_h) {
        const std::size_t m = y_.size();
        for (;;) {
            const double h = std::min(h_, h_cap);
            if (h < min_h) return false;
            for (std::size_t s = 1; s < 7; ++s) {
                for (std::size_t i = 0; i < m; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < s; ++j) acc += DP45::a[s][j] * k_[j][i];
                    stage_[i] = y_[i] + h * acc;
                }
                f_(stage_, k_[s]);
            }
            double ratio = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                double acc5 = 0.0, acc4 = 0.0;
                for (std::size_t s = 0; s < 7; ++s) {
                    acc5 += DP45::b5[s] * k_[s][i];
                    acc4 += DP45::b4[s] * k_[s][i];
                }
                y_new_[i] = y_[i] + h * acc5;
                const double err = h * (acc5 - acc4);
                const double scale = abs_ + rel_ * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
                ratio = std::max(ratio, std::abs(err) / scale);
            }
            const double grow =
                ratio > 0.0 ? std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0) : 5.0;
            if (ratio <= 1.0) {
                t_ += h;
                std::swap(y_, y_new_);
                std::swap(k_[0], k_[6]);  // FSAL
                h_ = h * grow;
                ++stats_.steps_accepted;
                stats_.min_step = std::min(stats_.min_step, h);
                return true;
            }
            ++stats_.steps_rejected;
            h_ = h * grow;
        }
    }

private:
    FastRhs f_;
    std::vector<double> y_;
    std::array<std::vector<double>, 7> k_;
    std::vector<double> stage_, y_new_;
    double t_;
    double h_ = 1e-4;
    double rel_, abs_;
    IntegratorStats stats_;
};

}  // namespace detail

// Integrates from the initial field to t_end, recording sample_count
// uniformly spaced states (endpoints included). On step collapse the
// trajectory is truncated at the last completed sample and
// completed = false.
inline Trajectory integrate(const ShellField& initial, const ModelParams& p, double t_end,
                            double rel_tol, double abs_tol, int sample_count = 201) {
    p.validate();
    initial.validate(p);
    if (!(t_end > initial.time)) throw std::invalid_argument("integrate: t_end must exceed start");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be > 0");
    if (sample_count < 2) throw std::invalid_argument("integrate: need at least 2 samples");

    Trajectory traj;
    traj.params = p;
    traj.samples.reserve(static_cast<std::size_t>(sample_count));
    traj.samples.push_back(initial);

    const double span = t_end - initial.time;
    const double min_h = 1e-14 * span;
    detail::Stepper st(p, initial.values, initial.time, rel_tol, abs_tol);
    for (int j = 1; j < sample_count; ++j) {
        const double target = initial.time + span * j / (sample_count - 1);
        bool ok = true;
        while (st.t() < target) {
            if (!st.step(target - st.t(), min_h)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            traj.completed = false;
            break;
        }
        traj.samples.push_back(ShellField{st.t(), st.y()});
    }
    traj.stats = st.stats();
    return traj;
}

enum class BlowupTrigger { NormThreshold, StepCollapse };

struct BlowupReport {
    bool detected = false;
    std::optional<double> t_estimate;  // time of threshold crossing / collapse
    BlowupTrigger trigger = BlowupTrigger::NormThreshold;
    double s_norm_used = 0.0;
};

// Integrates until the H^s norm crosses the threshold, the step size
// collapses (both reported as detections), or t_max passes quietly.
inline BlowupReport detect_blowup(const ShellField& initial, const ModelParams& p, double s,
                                  double threshold, double t_max, double rel_tol = 1e-8,
                                  double abs_tol = 1e-12) {
    p.validate();
    initial.validate(p);
    if (!(threshold > 0.0)) throw std::invalid_argument("detect_blowup: threshold must be > 0");
    if (!(t_max > initial.time))
        throw std::invalid_argument("detect_blowup: t_max must exceed start");

    BlowupReport rep;
    rep.s_norm_used = s;
    const double thr_sq = threshold * threshold;
    const double min_h = 1e-14 * (t_max - initial.time);
    detail::Stepper st(p, initial.values, initial.time, rel_tol, abs_tol);
    while (st.t() < t_max) {
        if (!st.step(t_max - st.t(), min_h)) {
            rep.detected = true;
            rep.trigger = BlowupTrigger::StepCollapse;
            rep.t_estimate = st.t();
            return rep;
        }
        if (sobolev_norm_sq(ShellField{st.t(), st.y()}, s) >= thr_sq) {
            rep.detected = true;
            rep.trigger = BlowupTrigger::NormThreshold;
            rep.t_estimate = st.t();
            return rep;
        }
    }
    return rep;
}

// Checks one shell of a sampled trajectory against its own
// variation-of-constants representation
//   Y_n(t) = e^{-Q(t)} [ Y_n(t_0) + int_{t_0}^t e^{Q(s)} source(s) ds ],
// where damping = d1 k_{n+1} Y_{n+1} - d2 k_{n-1} Y_{n-1} (ghost shells
// zero), source = k_n (d1 Y_{n-1}^2 - d2 Y_{n+1}^2) plus the forcing at
// shell 0, and Q integrates the damping. Both integrals use composite
// trapezoid on the sample grid; the prediction is propagated one sample
// interval at a time through local integrating factors, so no large
// exponentials are ever formed. Returns the largest absolute deviation
// from the recorded samples.
inline double variation_check(const Trajectory& traj, int shell) {
    const std::size_t m = traj.samples.size();
    if (m < 8) throw std::invalid_argument("variation_check: need at least 8 samples");
    const ModelParams& p = traj.params;
    if (shell < 0 || shell > p.n_shells)
        throw std::invalid_argument("variation_check: shell out of range");
    const std::size_t n = static_cast<std::size_t>(shell);

    const auto damping = [&](const std::vector<double>& y) {
        double d = 0.0;
        if (shell < p.n_shells) d += p.delta1 * wavenumber(p, shell + 1) * y[n + 1];
        if (shell >= 1) d -= p.delta2 * wavenumber(p, shell - 1) * y[n - 1];
        return d;
    };
    const auto source = [&](const std::vector<double>& y) {
        const double ym = shell >= 1 ? y[n - 1] : 0.0;
        const double yp = shell < p.n_shells ? y[n + 1] : 0.0;
        double s = wavenumber(p, shell) * (p.delta1 * ym * ym - p.delta2 * yp * yp);
        if (shell == 0) s += p.forcing;
        return s;
    };

    double pred = traj.samples[0].values[n];
    double worst = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        const auto& prev = traj.samples[j - 1];
        const auto& cur = traj.samples[j];
        const double dt = cur.time - prev.time;
        const double dq = 0.5 * dt * (damping(prev.values) + damping(cur.values));
        const double decay = std::exp(-dq);
        pred = decay * pred + 0.5 * dt * (decay * source(prev.values) + source(cur.values));
        worst = std::max(worst, std::abs(pred - cur.values[n]));
    }
    return worst;
}

// Scans the sampled trajectory for interior shells whose transfer source
// k_n (d1 Y_{n-1}^2 - d2 Y_{n+1}^2) is negative; a nonnegative source is
// what keeps shells of nonnegative data nonnegative. Reports (time,
// shell) pairs for n = 1..N-1.
inline std::vector<std::pair<double, int>> positivity_probe(const Trajectory& traj) {
    std::vector<std::pair<double, int>> bad;
    const ModelParams& p = traj.params;
    for (const ShellField& f : traj.samples) {
        for (int nn = 1; nn < p.n_shells; ++nn) {
            const std::size_t i = static_cast<std::size_t>(nn);
            const double s = p.delta1 * f.values[i - 1] * f.values[i - 1] -
                             p.delta2 * f.values[i + 1] * f.values[i + 1];
            if (s < 0.0) bad.emplace_back(f.time, nn);
        }
    }
    return bad;
}

}  // namespace dyadic
