#pragma once

// Parameter-plane sweep: one record per (delta1, delta2) grid cell,
// computed concurrently and written in sorted order so the output is
// independent of scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dyadic/io.hpp"
#include "dyadic/model.hpp"
#include "dyadic/ode.hpp"
#include "dyadic/selfsimilar.hpp"
#include "dyadic/stationary.hpp"

namespace dyadic {

struct SweepRecord {
    double delta1 = 0.0;
    double delta2 = 0.0;
    double ratio = 0.0;
    RegimeTag regime = RegimeTag::CriticalRatio;
    bool constant_found = false;
    bool selfsimilar_found = false;
    std::optional<double> k41_constant;  // self-similar construction's when found, else constant's
    std::optional<double> shoot_root;
    std::optional<double> blowup_time;
};

struct SweepGrid {
    double d1_lo = 0.01, d1_hi = 2.0;
    int d1_count = 20;
    double d2_lo = 0.01, d2_hi = 2.0;
    int d2_count = 20;

    void validate() const {
        if (d1_count < 2 || d2_count < 2)
            throw std::invalid_argument("sweep grid: need at least 2 points per axis");
        if (!(d1_lo > 0.0) || !(d2_lo > 0.0) || !(d1_hi > d1_lo) || !(d2_hi > d2_lo))
            throw std::invalid_argument("sweep grid: bounds must be positive and increasing");
    }

    double d1_at(int i) const {
        return d1_lo * std::pow(d1_hi / d1_lo, static_cast<double>(i) / (d1_count - 1));
    }
    double d2_at(int j) const {
        return d2_lo * std::pow(d2_hi / d2_lo, static_cast<double>(j) / (d2_count - 1));
    }
};

namespace detail {

// One pure cell computation. Construction failures are recorded as
// absent results, never propagated: a sweep always yields a full grid.
inline SweepRecord sweep_cell(double d1, double d2, const ModelParams& base, double a0_seed,
                              double a1_seed, double blowup_t_max) {
    ModelParams p = base;
    p.delta1 = d1;
    p.delta2 = d2;
    SweepRecord rec;
    rec.delta1 = d1;
    rec.delta2 = d2;
    const RegimeClass rc = regime_classify(p);
    rec.ratio = d2 > 0.0 ? d1 / d2 : std::numeric_limits<double>::infinity();
    rec.regime = rc.tag;

    if (p.forcing > 0.0) {
        try {
            CoefficientSequence c;
            if (rc.tag == RegimeTag::ObukhovDominant || rc.tag == RegimeTag::PureObukhov)
                c = build_constant_solution(a0_seed, p);
            else
                c = find_unique_constant(p, 40);
            rec.constant_found = true;
            rec.k41_constant = c.k41_constant;
        } catch (const std::exception&) {
        }
    }

    try {
        const auto band = selfsimilar_band(p);
        if (band == SelfSimilarBand::MultiSolution) {
            CoefficientSequence s = build_selfsimilar(a1_seed, p, 60);
            rec.selfsimilar_found = true;
            rec.k41_constant = s.k41_constant;
        } else if (band == SelfSimilarBand::Unique || band == SelfSimilarBand::Above) {
            ShootResult s = shoot_selfsimilar(p, 40);
            rec.selfsimilar_found = true;
            rec.shoot_root = s.root;
            rec.k41_constant = s.sequence.k41_constant;
        }
    } catch (const std::exception&) {
    }

    if (blowup_t_max > 0.0) {
        ShellField f;
        f.values.resize(static_cast<std::size_t>(p.n_shells) + 1);
        for (int n = 0; n <= p.n_shells; ++n)
            f.values[static_cast<std::size_t>(n)] = std::exp2(-static_cast<double>(n));
        const BlowupReport rep = detect_blowup(f, p, 1.0, 1e6, blowup_t_max);
        if (rep.detected) rec.blowup_time = rep.t_estimate;
    }
    return rec;
}

}  // namespace detail

// Runs the grid with up to `workers` threads; records come back sorted
// by (delta1, delta2).
inline std::vector<SweepRecord> run_sweep(const SweepGrid& grid, const ModelParams& base,
                                          double a0_seed, double a1_seed, double blowup_t_max,
                                          int workers) {
    grid.validate();
    base.validate();
    if (workers < 1) workers = 1;

    const int total = grid.d1_count * grid.d2_count;
    std::vector<SweepRecord> records(static_cast<std::size_t>(total));
    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int idx = next.fetch_add(1);
            if (idx >= total) return;
            const int i = idx / grid.d2_count;
            const int j = idx % grid.d2_count;
            records[static_cast<std::size_t>(idx)] = detail::sweep_cell(
                grid.d1_at(i), grid.d2_at(j), base, a0_seed, a1_seed, blowup_t_max);
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(workers, total);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        if (a.delta1 != b.delta1) return a.delta1 < b.delta1;
        return a.delta2 < b.delta2;
    });
    return records;
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
    std::ofstream out = detail::open_output(path);
    out << "delta1,delta2,ratio,regime,constant_found,selfsimilar_found,k41_constant,shoot_root,"
           "blowup_time\n";
    for (const SweepRecord& r : records) {
        out << format_double(r.delta1) << ',' << format_double(r.delta2) << ','
            << format_double(r.ratio) << ',' << regime_name(r.regime) << ','
            << (r.constant_found ? 1 : 0) << ',' << (r.selfsimilar_found ? 1 : 0) << ',';
        if (r.k41_constant) out << format_double(*r.k41_constant);
        out << ',';
        if (r.shoot_root) out << format_double(*r.shoot_root);
        out << ',';
        if (r.blowup_time) out << format_double(*r.blowup_time);
        out << "\n";
    }
}

}  // namespace dyadic
