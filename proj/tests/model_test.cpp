// Core model types: parameter validation, wavenumbers, regime
// classification, right-hand side structure, energy balance, and the
// residual functionals used as independent checks by the constructors.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "dyadic/model.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

dyadic::ModelParams make_params(double beta, double d1, double d2, double F, int N) {
    dyadic::ModelParams p;
    p.beta = beta;
    p.delta1 = d1;
    p.delta2 = d2;
    p.forcing = F;
    p.n_shells = N;
    return p;
}

dyadic::ShellField random_field(std::mt19937_64& rng, int n_shells) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    dyadic::ShellField y;
    y.values.resize(static_cast<std::size_t>(n_shells) + 1);
    for (auto& v : y.values) v = unit(rng);
    return y;
}

}  // namespace

TEST_CASE("parameter validation rejects out-of-range values") {
    CHECK_NOTHROW(dyadic::ModelParams{}.validate());

    CHECK_THROWS_AS(make_params(0.0, 1, 1, 0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(-1.0, 1, 1, 0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, -0.1, 1, 0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 1, -0.1, 0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 1, 1, -1.0, 8).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_params(1.0, 1, 1, 0, 1).validate(), std::invalid_argument);

    // Zero couplings are individually legal (single-family models).
    CHECK_NOTHROW(make_params(1.0, 0.0, 1.0, 0, 8).validate());
    CHECK_NOTHROW(make_params(1.0, 1.0, 0.0, 0, 8).validate());
}

TEST_CASE("wavenumbers grow geometrically with the shell index") {
    const auto p = make_params(1.0, 1, 1, 0, 8);
    CHECK(dyadic::wavenumber(p, 0) == 1.0);
    CHECK(dyadic::wavenumber(p, 1) == 2.0);
    CHECK(dyadic::wavenumber(p, 10) == 1024.0);
    CHECK(dyadic::wavenumber(p, -1) == 0.5);

    const auto ph = make_params(0.5, 1, 1, 0, 8);
    CHECK(dyadic::wavenumber(ph, 4) == 4.0);
    CHECK_THAT(dyadic::wavenumber(ph, 3), WithinRel(std::pow(2.0, 1.5), 1e-15));
}

TEST_CASE("regime classification splits at the two coupling-ratio thresholds") {
    const double crit = std::exp2(-4.0 / 3.0);  // k_1^{-4/3} at beta = 1

    CHECK(dyadic::regime_classify(make_params(1, 0.1, 1, 0, 8)).tag ==
          dyadic::RegimeTag::ObukhovDominant);
    CHECK(dyadic::regime_classify(make_params(1, crit, 1, 0, 8)).tag ==
          dyadic::RegimeTag::CriticalRatio);
    CHECK(dyadic::regime_classify(make_params(1, 0.9, 1, 0, 8)).tag ==
          dyadic::RegimeTag::KPDominant);
    CHECK(dyadic::regime_classify(make_params(1, 1.0, 1, 0, 8)).tag ==
          dyadic::RegimeTag::KPDominant);
    CHECK(dyadic::regime_classify(make_params(1, 1.5, 1, 0, 8)).tag ==
          dyadic::RegimeTag::OutsideSelfSimilarBand);

    const auto kp = dyadic::regime_classify(make_params(1, 1, 0, 0, 8));
    CHECK(kp.tag == dyadic::RegimeTag::PureKP);
    CHECK(std::isinf(kp.ratio));

    const auto ob = dyadic::regime_classify(make_params(1, 0, 1, 0, 8));
    CHECK(ob.tag == dyadic::RegimeTag::PureObukhov);
    CHECK(ob.ratio == 0.0);

    CHECK_THROWS_AS(dyadic::regime_classify(make_params(1, 0, 0, 0, 8)), std::invalid_argument);

    // The critical threshold moves with beta: 2^{-4 beta / 3}.
    CHECK(dyadic::regime_classify(make_params(2.0, 0.12, 1, 0, 8)).tag ==
          dyadic::RegimeTag::ObukhovDominant);
    CHECK(dyadic::regime_classify(make_params(0.5, 0.12, 1, 0, 8)).tag ==
          dyadic::RegimeTag::ObukhovDominant);
    CHECK(dyadic::regime_classify(make_params(0.25, 0.9, 1, 0, 8)).tag ==
          dyadic::RegimeTag::KPDominant);
}

TEST_CASE("right-hand side reduces to the single-family forms") {
    std::mt19937_64 rng(91u);
    const int N = 16;

    // Independent hand-coded single-family RHS implementations.
    const auto forward_only = [](const dyadic::ShellField& y, const dyadic::ModelParams& p) {
        std::vector<double> out(y.values.size(), 0.0);
        const auto& Y = y.values;
        out[0] = -p.delta1 * dyadic::wavenumber(p, 1) * Y[0] * Y[1] + p.forcing;
        for (int n = 1; n <= p.n_shells; ++n) {
            const double yp = n == p.n_shells ? 0.0 : Y[static_cast<std::size_t>(n) + 1];
            out[static_cast<std::size_t>(n)] =
                p.delta1 * (dyadic::wavenumber(p, n) * Y[static_cast<std::size_t>(n) - 1] *
                                Y[static_cast<std::size_t>(n) - 1] -
                            dyadic::wavenumber(p, n + 1) * Y[static_cast<std::size_t>(n)] * yp);
        }
        return out;
    };
    const auto backward_only = [](const dyadic::ShellField& y, const dyadic::ModelParams& p) {
        std::vector<double> out(y.values.size(), 0.0);
        const auto& Y = y.values;
        out[0] = -p.delta2 * Y[1] * Y[1] + p.forcing;
        for (int n = 1; n <= p.n_shells; ++n) {
            const double yp = n == p.n_shells ? 0.0 : Y[static_cast<std::size_t>(n) + 1];
            out[static_cast<std::size_t>(n)] =
                -p.delta2 * (dyadic::wavenumber(p, n) * yp * yp -
                             dyadic::wavenumber(p, n - 1) * Y[static_cast<std::size_t>(n)] *
                                 Y[static_cast<std::size_t>(n) - 1]);
        }
        return out;
    };

    for (int trial = 0; trial < 20; ++trial) {
        const auto y = random_field(rng, N);

        const auto p1 = make_params(0.8, 1.7, 0.0, 0.3, N);
        const auto r1 = dyadic::rhs(y, p1);
        const auto h1 = forward_only(y, p1);
        for (std::size_t n = 0; n < r1.values.size(); ++n)
            CHECK_THAT(r1.values[n], WithinAbs(h1[n], 1e-13));

        const auto p2 = make_params(1.3, 0.0, 0.6, 0.1, N);
        const auto r2 = dyadic::rhs(y, p2);
        const auto h2 = backward_only(y, p2);
        for (std::size_t n = 0; n < r2.values.size(); ++n)
            CHECK_THAT(r2.values[n], WithinAbs(h2[n], 1e-13));
    }
}

TEST_CASE("shell-to-shell exchange telescopes in the energy balance") {
    // sum_n Y_n * (dY_n/dt) must equal F * Y_0 identically: every
    // quadratic exchange term cancels against its neighbor, including at
    // the truncation boundary.
    std::mt19937_64 rng(92u);
    std::uniform_real_distribution<double> beta_dist(0.3, 2.5);
    std::uniform_real_distribution<double> coupling(0.0, 3.0);
    std::uniform_real_distribution<double> force(0.0, 2.0);

    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto p =
            make_params(beta_dist(rng), coupling(rng), coupling(rng), force(rng), 12);
        const auto y = random_field(rng, p.n_shells);
        const auto r = dyadic::rhs(y, p);

        double flux = 0.0, scale = 1.0;
        for (std::size_t n = 0; n < y.values.size(); ++n) {
            flux += y.values[n] * r.values[n];
            scale += std::abs(y.values[n] * r.values[n]);
        }
        const double expected = p.forcing * y.values[0];
        worst = std::max(worst, std::abs(flux - expected) / scale);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("rhs rejects malformed fields") {
    const auto p = make_params(1, 1, 1, 0, 8);
    dyadic::ShellField y;
    y.values.assign(5, 0.1);  // wrong length
    CHECK_THROWS_AS(dyadic::rhs(y, p), std::invalid_argument);

    y.values.assign(9, 0.1);
    y.values[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(dyadic::rhs(y, p), std::invalid_argument);
}

TEST_CASE("energy and Sobolev norms") {
    dyadic::ShellField y;
    y.values = {1.0, 2.0, 0.0, 0.5};
    CHECK(dyadic::energy(y) == 5.25);

    // s = 0 reduces to the plain energy; single-shell fields isolate the
    // weight 2^{2 s n}.
    CHECK(dyadic::sobolev_norm_sq(y, 0.0) == dyadic::energy(y));
    dyadic::ShellField e3;
    e3.values = {0.0, 0.0, 0.0, 3.0};
    CHECK_THAT(dyadic::sobolev_norm_sq(e3, 0.5), WithinRel(8.0 * 9.0, 1e-15));
    CHECK_THAT(dyadic::sobolev_norm_sq(e3, 1.0), WithinRel(64.0 * 9.0, 1e-15));

    // Monotone in s for any field (weights only grow).
    CHECK(dyadic::sobolev_norm_sq(y, 1.0) >= dyadic::sobolev_norm_sq(y, 0.5));

    // Overflow saturates to a finite value instead of returning inf.
    dyadic::ShellField huge;
    huge.values.assign(600, 1e200);
    const double s = dyadic::sobolev_norm_sq(huge, 1.0);
    CHECK(std::isfinite(s));
    CHECK(s == std::numeric_limits<double>::max());
}

TEST_CASE("stationary residual matches hand-computed balances") {
    // All-ones sequence at beta = 1, d1 = d2 = 1, F = 0: components are
    // small integers computable by hand.
    dyadic::CoefficientSequence seq;
    seq.kind = dyadic::SequenceKind::Constant;
    seq.values = {1.0, 1.0, 1.0, 1.0};
    const auto p = make_params(1, 1, 1, 0, 3);

    const auto res = dyadic::stationary_residual(seq, p);
    REQUIRE(res.size() == 3);
    CHECK(res[0] == 3.0);   // 2*1*1 + 1*1 - 0
    CHECK(res[1] == -3.0);  // (2 - 4) - (2 - 1)
    CHECK(res[2] == -6.0);  // (4 - 8) - (4 - 2)

    // The Kolmogorov ray a_n = C 2^{-beta n / 3} annihilates every
    // interior component for arbitrary couplings: both exchange families
    // balance separately on it.
    std::mt19937_64 rng(93u);
    std::uniform_real_distribution<double> beta_dist(0.4, 2.0);
    std::uniform_real_distribution<double> coupling(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto q = make_params(beta_dist(rng), coupling(rng), coupling(rng), 1.0, 20);
        dyadic::CoefficientSequence ray;
        ray.kind = dyadic::SequenceKind::Constant;
        ray.values.resize(21);
        for (int n = 0; n <= 20; ++n)
            ray.values[static_cast<std::size_t>(n)] = 1.7 * std::exp2(-q.beta * n / 3.0);
        const auto r = dyadic::stationary_residual(ray, q);
        for (std::size_t n = 1; n < r.size(); ++n) {
            const double scale =
                (q.delta1 + q.delta2 + 1.0) * dyadic::wavenumber(q, static_cast<int>(n) + 1) *
                ray.values[n] * ray.values[n];
            CHECK(std::abs(r[n]) <= 1e-14 * scale);
        }
    }

    dyadic::CoefficientSequence wrong_kind;
    wrong_kind.kind = dyadic::SequenceKind::SelfSimilar;
    wrong_kind.values = {0.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(dyadic::stationary_residual(wrong_kind, p), std::invalid_argument);
}

TEST_CASE("self-similar residual matches hand-computed balances") {
    const auto p_kp = make_params(1, 1, 0, 0, 3);

    // Pure forward family, seed (0, 1): the relation pins a_2 = 1/4 and
    // component 1 vanishes exactly in binary arithmetic.
    dyadic::CoefficientSequence seq;
    seq.kind = dyadic::SequenceKind::SelfSimilar;
    seq.values = {0.0, 1.0, 0.25, 1.0};
    auto res = dyadic::selfsimilar_residual(seq, p_kp);
    REQUIRE(res.size() == 3);
    CHECK(res[0] == 0.0);
    CHECK(res[1] == 0.0);  // 1/2 + (0 - 2 * 1 * 1/4)

    // Pure backward family: component 1 is a_1/2 - a_2^2 + 0.
    const auto p_ob = make_params(1, 0, 1, 0, 3);
    seq.values = {0.0, 1.0, 0.6, 0.5};
    res = dyadic::selfsimilar_residual(seq, p_ob);
    CHECK_THAT(res[1], WithinAbs(0.14, 1e-15));                 // 1/2 - 0.36
    CHECK_THAT(res[2], WithinAbs(0.6 / 4 - 0.25 + 0.3, 1e-15));  // a_2/4 - a_3^2 + a_2 a_1 / 2

    dyadic::CoefficientSequence unpinned;
    unpinned.kind = dyadic::SequenceKind::SelfSimilar;
    unpinned.values = {0.1, 1.0, 0.25, 1.0};
    CHECK_THROWS_AS(dyadic::selfsimilar_residual(unpinned, p_kp), std::invalid_argument);

    dyadic::CoefficientSequence wrong_kind;
    wrong_kind.kind = dyadic::SequenceKind::Constant;
    wrong_kind.values = {0.0, 1.0, 0.25, 1.0};
    CHECK_THROWS_AS(dyadic::selfsimilar_residual(wrong_kind, p_kp), std::invalid_argument);
}

TEST_CASE("coefficient sequence validation") {
    dyadic::CoefficientSequence seq;
    seq.kind = dyadic::SequenceKind::Constant;
    seq.values = {1.0, 0.5, 0.25};
    CHECK_NOTHROW(seq.validate());

    seq.values[1] = -0.5;
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    seq.values[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    seq.values[1] = 0.5;

    seq.k41_constant = 0.0;
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    seq.k41_constant = 0.8;
    CHECK_NOTHROW(seq.validate());

    // Self-similar sequences pin a_0 = 0 and carry a negative time origin.
    seq.kind = dyadic::SequenceKind::SelfSimilar;
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    seq.values[0] = 0.0;
    CHECK_NOTHROW(seq.validate());
    seq.t_origin = 1.0;
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    seq.t_origin = -1.0;
    CHECK_NOTHROW(seq.validate());
}

TEST_CASE("ratio sequence validation") {
    dyadic::RatioSequence r;
    r.values = {1.0, 0.9, 1.1};
    CHECK_NOTHROW(r.validate());
    r.values.push_back(0.0);
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r.values.back() = -2.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}
