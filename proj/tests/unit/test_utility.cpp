// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "dynoffset/errors.hpp"
#include "dynoffset/oracle.hpp"
#include "dynoffset/quadrature.hpp"
#include "dynoffset/utility.hpp"
#include "support.hpp"

using namespace dynoffset;

namespace
{

// E[log(c + s G)] for G ~ Exp(lambda), c > 0.
double log_shift_mean(double c, double s, double lambda)
{
    const double a = lambda * c / s;
    return std::log(c) - std::exp(a) * std::expint(-a);
}

// E[log(1 + s h) | h > psi]
double ww_good(double s, double lambda, double psi)
{
    const double a = lambda * psi + lambda / s;
    return std::log1p(s * psi) - std::exp(a) * std::expint(-a);
}

const SystemParams unit{1.0, 1.0, 0.25};

}  // namespace

TEST_CASE("no interference matches the exponential integral")
{
    for (double s : {0.1, 1.0, 10.0})
    {
        const SystemParams sys{s, 1.0, 0.2};
        UtilityEngine engine(sys, 1e-11);
        for (double lambda : {0.1, 0.6, 3.0})
        {
            for (double psi : {0.0, 0.4, 2.5})
            {
                const auto u = make_user_profile(lambda, 0.5, psi);
                const double full = log_shift_mean(1.0, s, lambda);
                CHECK(engine.unconditional({0, 0}, u, u)
                      == doctest::Approx(full).epsilon(1e-9));
                const double good = ww_good(s, lambda, psi);
                CHECK(engine.value({0, 0}, Conditioning::Good, u, u)
                      == doctest::Approx(good).epsilon(1e-9));
                if (psi > 0)
                {
                    const double bad = (full - u.alpha() * good)
                                       / u.bad_probability();
                    CHECK(engine.value({0, 0}, Conditioning::Bad, u, u)
                          == doctest::Approx(bad).epsilon(1e-8));
                }
            }
        }
    }
}

TEST_CASE("single exponential interferer in closed form")
{
    const double s = 2.0;
    const SystemParams sys{s, 1.0, 0.2};
    for (double lambda : {0.3, 1.7})
    {
        for (double h : {0.0, 0.5, 6.0})
        {
            for (double shift : {0.0, 1.2})
            {
                const double c0 = 1.0 + s * shift;
                const double expect = log_shift_mean(c0 + s * h, s, lambda)
                                      - log_shift_mean(c0, s, lambda);
                CHECK(erlang_interference_expectation(h, 1, shift, lambda, sys,
                                                      1e-12)
                      == doctest::Approx(expect).epsilon(1e-9));
            }
        }
    }
    CHECK(erlang_interference_expectation(3.0, 0, 0.5, 1.0, sys)
          == doctest::Approx(std::log1p(s * 3.0 / (1 + s * 0.5))));
}

TEST_CASE("two-user pointwise rates equal the binomial sum")
{
    const auto opp = make_user_profile(0.8, 0.6, 1.3);
    for (double h : {0.01, 1.0, 7.0})
    {
        CHECK(c_cc_two_user(h, opp, unit)
              == doctest::Approx(c_multi(h, {1, 0}, opp, unit)).epsilon(1e-9));
        CHECK(c_wc_two_user(h, opp, unit)
              == doctest::Approx(c_multi(h, {0, 1}, opp, unit)).epsilon(1e-9));
        CHECK(c_multi(h, {0, 0}, opp, unit) == doctest::Approx(c_ww(h, unit)));
    }
}

TEST_CASE("engine equals the outer integral of the literal triple sum")
{
    const auto self = make_user_profile(0.6, 0.5, 0.9);
    const auto opp = self;
    UtilityEngine engine(unit, 1e-10);
    for (Opponents k : {Opponents{2, 1}, Opponents{0, 3}, Opponents{3, 0}})
    {
        auto f = [&](double h) { return c_multi(h, k, opp, unit, 1e-11); };
        const double good
            = integrate_exponential_tail(f, self.lambda(), self.psi(), 1e-9)
                  .value;
        const double bad = integrate_exponential_head(f, self.lambda(),
                                                      self.psi(), 1e-9)
                               .value;
        CHECK(engine.value(k, Conditioning::Good, self, opp)
              == doctest::Approx(good).epsilon(1e-7));
        CHECK(engine.value(k, Conditioning::Bad, self, opp)
              == doctest::Approx(bad).epsilon(1e-7));
        CHECK(engine.unconditional(k, self, opp)
              == doctest::Approx(self.alpha() * good
                                 + self.bad_probability() * bad)
                     .epsilon(1e-7));
    }
}

TEST_CASE("engine agrees with Monte Carlo")
{
    const auto u = make_user_profile(0.6, 0.5, 1.0);
    UtilityEngine engine(unit);
    std::uint64_t stream = 0;
    for (Opponents k : {Opponents{1, 0}, Opponents{0, 2}, Opponents{3, 4}})
    {
        for (auto c : {Conditioning::Bad, Conditioning::Good,
                       Conditioning::Full})
        {
            const auto mc
                = estimate_conditional(k, c, u, u, unit, 200000, 99, ++stream);
            const double z
                = (engine.value(k, c, u, u) - mc.mean) / mc.std_error;
            CHECK(std::abs(z) < 4.0);
        }
    }
}

TEST_CASE("degenerate conditioning")
{
    const auto zero = make_user_profile(1.0, 0.5, 0.0);
    UtilityEngine engine(unit);
    CHECK(engine.value({1, 0}, Conditioning::Bad, zero, zero) == 0.0);
    CHECK_THROWS_AS(conditional_utility({1, 0}, State::Bad, zero, zero, unit),
                    EmptyConditioningError);
    const auto far = make_user_profile(3.0, 0.5, 400.0);
    CHECK_THROWS_AS(conditional_utility({0, 0}, State::Good, far, far, unit),
                    EmptyConditioningError);
}

TEST_CASE("ordering across policies and states")
{
    testing::ScenarioSampler sample(11);
    for (int i = 0; i < 30; ++i)
    {
        const auto s = sample.pair_scenario();
        UtilityEngine engine(s.system);
        const auto& self = s.user(0);
        const auto& opp = s.user(1);
        for (auto c : {Conditioning::Bad, Conditioning::Good,
                       Conditioning::Full})
        {
            const double cc = engine.value({1, 0}, c, self, opp);
            const double wc = engine.value({0, 1}, c, self, opp);
            const double ww = engine.value({0, 0}, c, self, opp);
            CHECK(wc - cc > -1e-9);
            CHECK(ww - wc > -1e-9);
        }
        for (Opponents k : {Opponents{0, 0}, Opponents{0, 1}, Opponents{1, 0}})
        {
            CHECK(engine.value(k, Conditioning::Good, self, opp)
                      - engine.value(k, Conditioning::Bad, self, opp)
                  > -1e-9);
        }
    }
}

TEST_CASE("monotone in opponent counts and the exchange inequality")
{
    testing::ScenarioSampler sample(12);
    for (int i = 0; i < 20; ++i)
    {
        const auto s = sample.symmetric_scenario(8);
        UtilityEngine engine(s.system);
        const auto& u = s.user();
        const int k = sample.integer(0, 4);
        const int l = sample.integer(0, 3);
        for (auto c : {Conditioning::Bad, Conditioning::Good})
        {
            const double base = engine.value({k, l}, c, u, u);
            CHECK(base - engine.value({k + 1, l}, c, u, u) > -1e-9);
            CHECK(base - engine.value({k, l + 1}, c, u, u) > -1e-9);
            CHECK(engine.value({k, l + 1}, c, u, u)
                      - engine.value({k + 1, l}, c, u, u)
                  > -1e-9);
        }
    }
}

TEST_CASE("binomial helpers")
{
    CHECK(binomial_coefficient(10, 3) == 120.0);
    CHECK(binomial_coefficient(5, 7) == 0.0);
    CHECK(binomial_coefficient(100, 50)
          == doctest::Approx(1.0089134454556419e29).epsilon(1e-10));
    CHECK(binomial_pmf(4, 0, 0.0) == 1.0);
    CHECK(binomial_pmf(4, 4, 1.0) == 1.0);
    CHECK(binomial_pmf(4, 2, 1.0) == 0.0);
    double total = 0;
    for (int k = 0; k <= 30; ++k)
        total += binomial_pmf(30, k, 0.37);
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("large opponent sets stay finite")
{
    const auto u = make_user_profile(0.6, 0.5, 1.0);
    UtilityEngine engine(unit);
    const double v = engine.value({40, 39}, Conditioning::Good, u, u);
    CHECK(std::isfinite(v));
    CHECK(v > 0);
    CHECK(v < engine.value({40, 38}, Conditioning::Good, u, u));
    CHECK(c_multi(2.0, {35, 30}, u, unit) > 0);
}

TEST_CASE("utility table of the reference scenario")
{
    const auto s = testing::fig_defaults(9);
    UtilityEngine engine(s.system);
    const auto table = build_utility_table(s, engine);
    CHECK(table.entries.size() == 45 * 3);
    CHECK(table.violations().empty());
    CHECK(table.at(0, {0, 0}, Conditioning::Full)
          == doctest::Approx(log_shift_mean(1.0, 1.0, 0.6)).epsilon(1e-9));
    CHECK_THROWS_AS(table.at(0, {9, 0}, Conditioning::Full), Error);

    const auto pair = testing::pair({0.6, 0.5, 0.0}, {1.2, 0.5, 1.0}, 0.6);
    const auto t2 = build_utility_table(pair, engine);
    CHECK(t2.entries.size() == 3 * 2 + 3 * 3);
}

TEST_CASE("engine copies share one cache")
{
    UtilityEngine a(unit);
    UtilityEngine b = a;
    const auto u = make_user_profile(0.6, 0.5, 1.0);
    a.value({2, 2}, Conditioning::Good, u, u);
    CHECK(b.cached_components() == a.cached_components());
    CHECK(b.cached_components() > 0);
}
