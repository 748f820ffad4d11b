#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "abm/analytic.hpp"
#include "abm/oracle.hpp"

using namespace abm;

namespace {

MarketState mk(double spot, double sigma, double rate, double yield = 0.0,
               double tau = 0.5) {
    MarketState ms;
    ms.spot = spot;
    ms.sigma_s = sigma;
    ms.rate = rate;
    ms.yield = yield;
    ms.maturity_time = tau;
    return ms;
}

OptionContract contract(OptionKind kind, double strike,
                        Underlying u = Underlying::no_dividend) {
    return {kind, Exercise::european, strike, u};
}

} // namespace

TEST_CASE("terminal law of the underlying") {
    SECTION("drifting case") {
        const TerminalLaw law =
            terminal_law(mk(5, 3, 0.05), Underlying::no_dividend);
        CHECK(law.mean == Approx(5.1265756026221442).margin(1e-13));
        CHECK(law.stddev == Approx(2.1481151444562192).margin(1e-13));
    }
    SECTION("r = q is driftless") {
        const TerminalLaw law =
            terminal_law(mk(5, 3, 0.04, 0.04), Underlying::dividend_yield);
        CHECK(law.mean == 5.0);
        CHECK(law.stddev == Approx(3.0 * std::sqrt(0.5)).margin(1e-15));
    }
    SECTION("futures quote is already the forward") {
        const TerminalLaw law = terminal_law(mk(5, 3, 0.05), Underlying::futures);
        CHECK(law.mean == 5.0);
        CHECK(law.stddev == Approx(3.0 * std::sqrt(0.5)).margin(1e-15));
    }
    SECTION("zero sigma collapses to a point mass") {
        const TerminalLaw law = terminal_law(mk(5, 0, 0.05), Underlying::no_dividend);
        CHECK(law.stddev == 0.0);
        CHECK(law.mean == Approx(5.0 * std::exp(0.025)).margin(1e-15));
    }
}

TEST_CASE("Gauss-Legendre rule sanity") {
    const auto [x, w] = gauss_legendre_rule(64);
    double total = 0.0, quad = 0.0, expint = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        total += w[i];
        quad += w[i] * x[i] * x[i];
        expint += w[i] * std::exp(x[i]);
    }
    CHECK(total == Approx(2.0).margin(1e-14));
    CHECK(quad == Approx(2.0 / 3.0).margin(1e-14));
    CHECK(expint == Approx(std::exp(1.0) - std::exp(-1.0)).margin(1e-14));
}

TEST_CASE("quadrature oracle agrees with the closed forms") {
    SECTION("pinned examples") {
        const double c = price_by_quadrature(mk(5, 3, 0.05),
                                             contract(OptionKind::call, 5.0));
        CHECK(c == Approx(0.8989909846925440).margin(1e-10));
        const double fig2 = price_by_quadrature(mk(0, 3, 0.05),
                                                contract(OptionKind::call, -5.0));
        CHECK(fig2 == Approx(4.8836224264023084).margin(1e-10));
        CHECK(fig2 == Approx(4.88).margin(0.01));
    }
    SECTION("zero sigma returns the discounted forward intrinsic") {
        const double v = price_by_quadrature(mk(5, 0, 0.05),
                                             contract(OptionKind::call, 4.0));
        CHECK(v == Approx(std::exp(-0.025) *
                          (5.0 * std::exp(0.025) - 4.0)).margin(1e-15));
    }
    SECTION("randomized sweep, all kinds, both payoffs") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> spot(-50.0, 50.0);
        std::uniform_real_distribution<double> vol(1e-3, 20.0);
        std::uniform_real_distribution<double> rate(-0.05, 0.2);
        std::uniform_real_distribution<double> horizon(1e-3, 10.0);
        std::uniform_int_distribution<int> ukind(0, 2);
        std::uniform_int_distribution<int> okind(0, 1);
        for (int i = 0; i < 2000; ++i) {
            const MarketState ms =
                mk(spot(rng), vol(rng), rate(rng), rate(rng), horizon(rng));
            const OptionContract oc =
                contract(static_cast<OptionKind>(okind(rng)), spot(rng),
                         static_cast<Underlying>(ukind(rng)));
            const double quad = price_by_quadrature(ms, oc);
            const double analytic = price_european(ms, oc).price;
            CAPTURE(ms.spot, ms.sigma_s, ms.rate, ms.yield, ms.tau(), oc.strike);
            CHECK(quad == Approx(analytic).margin(1e-9));
        }
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(price_by_quadrature(mk(5, 3, 0.05),
                                            contract(OptionKind::call, 5.0), 8),
                        std::invalid_argument);
        OptionContract oc = contract(OptionKind::call, 5.0);
        oc.exercise = Exercise::american;
        CHECK_THROWS_AS(price_by_quadrature(mk(5, 3, 0.05), oc),
                        std::invalid_argument);
    }
}

TEST_CASE("counter-based uniforms") {
    CHECK(counter_uniform(1, 0) == counter_uniform(1, 0));
    CHECK(counter_uniform(1, 0) != counter_uniform(2, 0));
    CHECK(counter_uniform(1, 0) != counter_uniform(1, 1));
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = counter_uniform(42, static_cast<std::uint64_t>(i));
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / n == Approx(0.5).margin(0.005));
}

TEST_CASE("Monte Carlo estimator") {
    const MarketState ms = mk(5, 3, 0.05);
    const OptionContract oc = contract(OptionKind::call, 5.0);
    const double analytic = price_european(ms, oc).price;

    SECTION("identical config gives bit-identical output") {
        const McEstimate a = price_by_mc(ms, oc, {100000, 7, true});
        const McEstimate b = price_by_mc(ms, oc, {100000, 7, true});
        CHECK(a.price == b.price);
        CHECK(a.standard_error == b.standard_error);
        const McEstimate c = price_by_mc(ms, oc, {100000, 8, true});
        CHECK(a.price != c.price);
    }
    SECTION("estimate lands within three standard errors") {
        const McEstimate e = price_by_mc(ms, oc, {1000000, 42, true});
        CHECK(std::fabs(e.price - analytic) <= 3.0 * e.standard_error);
        CHECK(e.standard_error > 0.0);
        CHECK(e.standard_error < 0.01);
    }
    SECTION("futures anchor within three standard errors") {
        const MarketState f = mk(7, 1, 0.0, 0.0, 1.0);
        const OptionContract fo = contract(OptionKind::call, 7.0, Underlying::futures);
        const McEstimate e = price_by_mc(f, fo, {200000, 3, true});
        CHECK(std::fabs(e.price - 0.3989422804014327) <= 3.0 * e.standard_error);
    }
    SECTION("coverage across seeds") {
        int hits = 0;
        const int trials = 200;
        for (int seed = 1; seed <= trials; ++seed) {
            const McEstimate e =
                price_by_mc(ms, oc, {20000, static_cast<std::uint64_t>(seed), false});
            if (std::fabs(e.price - analytic) <= 3.0 * e.standard_error) ++hits;
        }
        CHECK(hits >= trials - 6);
    }
    SECTION("antithetic pairing does not hurt, and here helps") {
        const McEstimate plain = price_by_mc(ms, oc, {200000, 11, false});
        const McEstimate anti = price_by_mc(ms, oc, {200000, 11, true});
        CHECK(anti.standard_error <= plain.standard_error);
    }
    SECTION("zero sigma is exact with zero error") {
        const McEstimate e = price_by_mc(mk(5, 0, 0.05), oc, {1000, 1, true});
        CHECK(e.price == Approx(5.0 - 5.0 * std::exp(-0.025)).margin(1e-15));
        CHECK(e.standard_error == 0.0);
    }
    SECTION("config validation") {
        CHECK_THROWS_AS(price_by_mc(ms, oc, {1, 1, false}), std::invalid_argument);
        OptionContract am = oc;
        am.exercise = Exercise::american;
        CHECK_THROWS_AS(price_by_mc(ms, am, {1000, 1, false}),
                        std::invalid_argument);
    }
}
