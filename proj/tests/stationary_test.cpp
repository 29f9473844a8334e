// Constant (time-independent) solutions: the forcing relation for a_1,
// the attracting-side family constructor, the repelling-side shooting
// solver with frozen roots, and the Kolmogorov-constant estimator.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dyadic/stationary.hpp"

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

}  // namespace

TEST_CASE("a1 solves the forcing relation") {
    // Single-family limits have closed forms with exact binary answers.
    CHECK(dyadic::a1_from_forcing(1.0, make_params(1, 1, 0, 2, 8)) == 1.0);
    CHECK(dyadic::a1_from_forcing(5.0, make_params(1, 0, 1, 4, 8)) == 2.0);
    // Mixed case chosen so the discriminant is a perfect square:
    // 2 a1 + a1^2 = 3 at a0 = 1 gives a1 = 1.
    CHECK_THAT(dyadic::a1_from_forcing(1.0, make_params(1, 1, 1, 3, 8)), WithinRel(1.0, 1e-15));

    CHECK_THROWS_AS(dyadic::a1_from_forcing(0.0, make_params(1, 1, 0, 2, 8)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::a1_from_forcing(1.0, make_params(1, 1, 1, 0, 8)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::a1_from_forcing(-1.0, make_params(1, 1, 1, 1, 8)),
                    std::invalid_argument);

    // Property: the returned a1 satisfies d1 k1 a0 a1 + d2 a1^2 = F.
    std::mt19937_64 rng(95u);
    std::uniform_real_distribution<double> unit(0.05, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = make_params(unit(rng), unit(rng), unit(rng), unit(rng), 8);
        const double a0 = unit(rng);
        const double a1 = dyadic::a1_from_forcing(a0, p);
        REQUIRE(a1 > 0.0);
        const double lhs = p.delta1 * dyadic::wavenumber(p, 1) * a0 * a1 + p.delta2 * a1 * a1;
        CHECK_THAT(lhs, WithinRel(p.forcing, 1e-14));
    }
}

TEST_CASE("attracting-side constants exist for every a0") {
    const auto p = make_params(1, 0.1, 1.0, 1.0, 60);

    for (double a0 : {0.2, 1.0, 5.0}) {
        const auto seq = dyadic::build_constant_solution(a0, p);
        REQUIRE(seq.values.size() == 61);
        CHECK(seq.kind == dyadic::SequenceKind::Constant);
        CHECK(seq.values[0] == a0);

        // Tail follows Kolmogorov scaling: normalized amplitudes plateau.
        const auto [est, drift] = dyadic::k41_constant(seq, p);
        CHECK(est > 0.0);
        CHECK(drift < 1e-6);
    }

    // a1 decreases when a0 grows (the forcing relation shares F).
    const auto lo = dyadic::build_constant_solution(0.2, p);
    const auto hi = dyadic::build_constant_solution(5.0, p);
    CHECK(lo.values[1] > hi.values[1]);
}

TEST_CASE("pure backward-family constants are independent of a0 from shell 1 on") {
    // With d1 = 0 the forcing relation reads d2 a1^2 = F regardless of a0.
    const auto p = make_params(1, 0.0, 1.0, 1.0, 40);
    const auto seq7 = dyadic::build_constant_solution(7.0, p);
    const auto seq2 = dyadic::build_constant_solution(2.0, p);
    CHECK(seq7.values[1] == 1.0);
    CHECK(seq2.values[1] == 1.0);
    // a_2 balances d2 a2^2 = d2 a1 a0 / k1.
    CHECK_THAT(seq7.values[2], WithinRel(std::sqrt(3.5), 1e-13));
    CHECK_THAT(seq2.values[2], WithinRel(std::sqrt(1.0), 1e-13));
}

TEST_CASE("family constructor rejects repelling-side parameters") {
    CHECK_THROWS_AS(dyadic::build_constant_solution(1.0, make_params(1, 1, 1, 1, 40)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::build_constant_solution(0.0, make_params(1, 0.1, 1, 1, 40)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::build_constant_solution(1.0, make_params(1, 0.1, 1, 0, 40)),
                    std::invalid_argument);
}

TEST_CASE("repelling-side constant shooting reproduces frozen roots") {
    // Roots frozen from an independent high-precision bisection of the
    // same parity observable.
    const auto p11 = make_params(1, 1.0, 1.0, 1.0, 40);
    const auto seq = dyadic::find_unique_constant(p11, 40);
    CHECK_THAT(seq.values[0], WithinRel(0.6715552384589292, 1e-10));
    CHECK(seq.kind == dyadic::SequenceKind::Constant);
    CHECK(seq.values.size() >= 20);  // cut at the plateau, well past shell 20

    // Forcing relation holds at the root.
    const double lhs = p11.delta1 * 2.0 * seq.values[0] * seq.values[1] +
                       p11.delta2 * seq.values[1] * seq.values[1];
    CHECK_THAT(lhs, WithinRel(1.0, 1e-9));

    const auto p2 = make_params(1, 1.0, 0.5, 2.0, 40);
    const auto seq2 = dyadic::find_unique_constant(p2, 40);
    CHECK_THAT(seq2.values[0], WithinRel(1.0253360144813009, 1e-10));
}

TEST_CASE("pure forward-family constants use the closed form") {
    const auto p = make_params(1, 1.0, 0.0, 1.0, 40);
    const auto seq = dyadic::find_unique_constant(p, 40);
    REQUIRE(seq.values.size() == 41);
    const double c_f = std::exp2(-1.0 / 3.0);  // sqrt(F / (d1 2^{2/3}))
    CHECK_THAT(seq.values[0], WithinRel(c_f, 1e-15));
    REQUIRE(seq.k41_constant.has_value());
    CHECK_THAT(*seq.k41_constant, WithinRel(c_f, 1e-15));
    for (int n = 0; n <= 40; ++n)
        CHECK_THAT(seq.values[static_cast<std::size_t>(n)],
                   WithinRel(c_f * std::exp2(-n / 3.0), 1e-14));
}

TEST_CASE("shooting rejects bad inputs") {
    const auto p = make_params(1, 1.0, 1.0, 1.0, 40);

    // Attracting side belongs to the family constructor.
    CHECK_THROWS_AS(dyadic::find_unique_constant(make_params(1, 0.1, 1, 1, 40), 40),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::find_unique_constant(make_params(1, 1, 1, 0, 40), 40),
                    std::invalid_argument);
    CHECK_THROWS_AS(dyadic::find_unique_constant(p, 1), std::invalid_argument);
    CHECK_THROWS_AS(dyadic::find_unique_constant(p, 61), std::invalid_argument);

    // An explicit bracket must straddle the root: both endpoints here sit
    // on the same side, and the solver must say so rather than return a
    // midpoint.
    CHECK_THROWS_AS(dyadic::find_unique_constant(p, 40, std::make_pair(0.9, 1.1)),
                    std::runtime_error);
    CHECK_THROWS_AS(dyadic::find_unique_constant(p, 40, std::make_pair(1.1, 0.9)),
                    std::invalid_argument);
}

TEST_CASE("explicit brackets around the root reproduce the scan result") {
    const auto p = make_params(1, 1.0, 1.0, 1.0, 30);
    const auto scanned = dyadic::find_unique_constant(p, 30);
    const double r = scanned.values[0];
    const auto bracketed =
        dyadic::find_unique_constant(p, 30, std::make_pair(r * 0.9, r * 1.1));
    CHECK_THAT(bracketed.values[0], WithinRel(r, 1e-10));
}

TEST_CASE("forward orbits diverge off the root and settle on the attracting side") {
    // Repelling side: seeds off the root classify as parity-divergent.
    const auto pr = make_params(1, 1.0, 1.0, 1.0, 40);
    const auto root = dyadic::find_unique_constant(pr, 40).values[0];
    for (double f : {0.5, 0.99, 1.01, 2.0}) {
        const auto cls =
            dyadic::detail::classify_parity(dyadic::detail::constant_profile(root * f, pr, 150));
        const bool div = cls == dyadic::detail::ParityClass::EvenUp ||
                         cls == dyadic::detail::ParityClass::OddUp;
        CHECK(div);
    }

    // Attracting side: every seed's profile converges.
    const auto pa = make_params(1, 0.1, 1.0, 1.0, 40);
    std::mt19937_64 rng(96u);
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double a0 = std::pow(10.0, logu(rng));
        const auto cls =
            dyadic::detail::classify_parity(dyadic::detail::constant_profile(a0, pa, 150));
        CHECK(cls == dyadic::detail::ParityClass::Converged);
    }
}

TEST_CASE("Kolmogorov-constant estimator") {
    const auto p = make_params(1, 1, 1, 1, 20);

    // Exact scaling ray: estimate equals the ray constant, zero drift.
    dyadic::CoefficientSequence ray;
    ray.kind = dyadic::SequenceKind::Constant;
    ray.values.resize(21);
    for (int n = 0; n <= 20; ++n)
        ray.values[static_cast<std::size_t>(n)] = 0.79 * std::exp2(-n / 3.0);
    const auto [est, drift] = dyadic::k41_constant(ray, p);
    CHECK_THAT(est, WithinRel(0.79, 1e-13));
    CHECK(drift < 1e-13);

    // A steeper geometric sequence never plateaus: large drift.
    dyadic::CoefficientSequence steep;
    steep.kind = dyadic::SequenceKind::Constant;
    steep.values.resize(21);
    for (int n = 0; n <= 20; ++n)
        steep.values[static_cast<std::size_t>(n)] = std::exp2(-n / 2.0);
    CHECK(dyadic::k41_constant(steep, p).second > 0.1);

    dyadic::CoefficientSequence tiny;
    tiny.values.assign(5, 1.0);
    CHECK_THROWS_AS(dyadic::k41_constant(tiny, p), std::invalid_argument);
}
