// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dynoffset/errors.hpp"
#include "dynoffset/hierarchy.hpp"
#include "support.hpp"

using namespace dynoffset;

namespace
{

double best_equilibrium_utility(const Scenario& s, const UtilityEngine& engine)
{
    double best = 0.0;
    for (const auto& c : enumerate_equilibria(s, engine))
        best = std::max(best, bs_utility(c, s));
    return best;
}

Scenario with_thresholds(const Scenario& s, double psi1, double psi2)
{
    Scenario out = s;
    out.users = {s.user(0).with_psi(psi1), s.user(1).with_psi(psi2)};
    return out;
}

// Plain bisection on the literal triple sum.
double best_response(const Scenario& s, int i, double psi_j)
{
    const auto opp = s.user(1 - i).with_psi(psi_j);
    auto f = [&](double h) { return c_multi(h, {0, 1}, opp, s.system); };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < s.system.v)
        hi *= 2;
    for (int it = 0; it < 100; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < s.system.v ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("smallest crossing")
{
    auto f = [](double x) { return std::sqrt(x); };
    CHECK(*smallest_crossing(f, 2.0, 100.0, 1.0, 1e-12, 1e-12)
          == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(*smallest_crossing(f, 0.0, 100.0, 1.0, 1e-12, 1e-12) == 0.0);
    CHECK_FALSE(smallest_crossing(f, 20.0, 100.0, 1.0, 1e-12, 1e-12));
}

TEST_CASE("k* and n* match a linear scan")
{
    const auto s = testing::fig_defaults(9);
    UtilityEngine engine(s.system);
    const auto& u = s.user();
    const auto t = find_kstar_nstar(s, 200, engine);
    int kstar = 0;
    int nstar = 0;
    for (int k = 1; k <= 200; ++k)
    {
        if (engine.unconditional({k - 1, 0}, u, u) >= s.system.v)
            kstar = k;
        if (engine.unconditional({0, k - 1}, u, u) >= s.system.v)
            nstar = k;
    }
    CHECK(t.kstar == kstar);
    CHECK(t.nstar == nstar);
    CHECK(t.kstar == 8);
    CHECK(t.nstar == 10);
    CHECK_FALSE(t.kstar_saturated);
    CHECK_FALSE(t.nstar_none);

    const auto capped = find_kstar_nstar(s, 9, engine);
    CHECK(capped.nstar == 9);
    CHECK(capped.nstar_saturated);

    const auto none = find_kstar_nstar(s.with_v(1e6), 50, engine);
    CHECK(none.kstar == 0);
    CHECK(none.kstar_none);
}

TEST_CASE("k* never exceeds n*")
{
    testing::ScenarioSampler sample(31);
    for (int i = 0; i < 20; ++i)
    {
        const auto s = sample.symmetric_scenario(2);
        UtilityEngine engine(s.system);
        const auto t = find_kstar_nstar(s, 400, engine);
        CHECK(t.kstar <= t.nstar);
    }
}

TEST_CASE("psi(k, l) is the smallest admissible threshold")
{
    const auto s = testing::fig_defaults(12);
    UtilityEngine engine(s.system);
    const auto& u = s.user();
    auto expr = [&](int k, int l, double psi) {
        const auto w = u.with_psi(psi);
        double m = INFINITY;
        if (l < k)
            m = std::min(m, engine.value({l, k - l - 1}, Conditioning::Good, w, w));
        if (l > 0)
            m = std::min(m, engine.value({l - 1, k - l}, Conditioning::Bad, w, w));
        return m;
    };
    int solved = 0;
    for (int k = 8; k <= 10; ++k)
    {
        for (int l = 0; l <= k; ++l)
        {
            const auto sol = solve_psi_kl(k, l, s, engine);
            if (!sol.psi || *sol.psi == 0)
                continue;
            ++solved;
            CHECK(expr(k, l, *sol.psi) >= s.system.v - s.root_tol);
            CHECK(expr(k, l, *sol.psi * (1 - 1e-4)) < s.system.v);
        }
    }
    CHECK(solved > 0);
}

TEST_CASE("symmetric Stackelberg below k* is all-CC")
{
    const auto s = testing::fig_defaults(6);
    UtilityEngine engine(s.system);
    const auto out = stackelberg_multi(s, engine);
    CHECK(out.regime == "all-cc");
    CHECK(out.induced.statistics.k_cc == 6);
    CHECK(out.poa.value == doctest::Approx(1.0));
    CHECK(check_no_deviation(out.induced, s.with_psi(out.psi_choice[0]), engine)
              .passed);
}

TEST_CASE("symmetric Stackelberg beats every grid threshold")
{
    const auto s = testing::fig_defaults(9);
    UtilityEngine engine(s.system);
    const auto out = stackelberg_multi(s, engine);
    REQUIRE_FALSE(out.infeasible);
    const double psi = out.psi_choice.at(0);
    const auto at = s.with_psi(psi);
    CHECK(check_no_deviation(out.induced, at, engine).passed);
    CHECK(out.bs_utility == doctest::Approx(bs_utility(out.induced, at)));

    double best_candidate = 0;
    for (const auto& c : out.candidates)
        best_candidate = std::max(best_candidate, c.value);
    CHECK(out.bs_utility == doctest::Approx(best_candidate));

    double grid_best = 0;
    for (int i = 1; i <= 40; ++i)
        grid_best = std::max(grid_best,
                             best_equilibrium_utility(s.with_psi(0.05 * i), engine));
    CHECK(grid_best <= out.bs_utility + 1e-6);
    CHECK(out.poa.value >= 1.0);
}

TEST_CASE("two-user Stackelberg beats every grid pair")
{
    const auto s = testing::pair({0.6, 0.5, 1.0}, {1.2, 0.5, 1.0}, 0.6);
    UtilityEngine engine(s.system);
    const auto out = stackelberg_two_user(s, engine);
    REQUIRE_FALSE(out.infeasible);
    REQUIRE(out.psi_choice.size() == 2);
    const auto at = with_thresholds(s, out.psi_choice[0], out.psi_choice[1]);
    CHECK(check_no_deviation(out.induced, at, engine).passed);

    double grid_best = 0;
    for (int i = 0; i <= 15; ++i)
    {
        for (int j = 0; j <= 15; ++j)
        {
            const auto g = with_thresholds(s, 0.2 * i, 0.2 * j);
            grid_best = std::max(grid_best, best_equilibrium_utility(g, engine));
        }
    }
    CHECK(grid_best <= out.bs_utility + 1e-6);
    CHECK(out.bs_utility >= grid_best - 0.05);
}

TEST_CASE("two-user Stackelberg regimes")
{
    const auto base = testing::pair({0.6, 0.5, 1.0}, {1.2, 0.5, 1.0}, 0.25);
    UtilityEngine engine(base.system);
    const auto cc = stackelberg_two_user(base, engine);
    CHECK(cc.regime == "all-cc");
    CHECK(cc.bs_utility == doctest::Approx(1.0));

    const auto none = stackelberg_two_user(base.with_v(1e6), engine);
    CHECK(none.infeasible);
    CHECK(none.poa.infinite);
    CHECK(none.bs_utility == 0.0);
}

TEST_CASE("non-cooperative fixed point")
{
    const auto s = testing::pair({0.6, 0.5, 1.0}, {1.2, 0.5, 1.0}, 0.6);
    const auto nc = noncooperative_two_user(s);
    REQUIRE_FALSE(nc.infeasible);
    CHECK(std::abs(nc.residual1) < 1e-6);
    CHECK(std::abs(nc.residual2) < 1e-6);
    CHECK(best_response(s, 0, nc.psi2) == doctest::Approx(nc.psi1).epsilon(1e-6));
    CHECK(best_response(s, 1, nc.psi1) == doctest::Approx(nc.psi2).epsilon(1e-6));
    CHECK(nc.induced.policies == std::array{Policy::WC, Policy::WC});
    const double expect = 0.5 * std::exp(-0.6 * nc.psi1)
                          + 0.5 * std::exp(-1.2 * nc.psi2);
    CHECK(nc.bs_utility == doctest::Approx(expect));

    CHECK(noncooperative_two_user(s.with_v(1e6)).infeasible);
    CHECK_THROWS_AS(noncooperative_two_user(s, 1), NumericalError);
}

TEST_CASE("leader commitment beats the non-cooperative outcome")
{
    testing::ScenarioSampler sample(32);
    int compared = 0;
    for (int i = 0; i < 6; ++i)
    {
        const auto s = sample.pair_scenario();
        UtilityEngine engine(s.system);
        const auto st = stackelberg_two_user(s, engine);
        const auto nc = noncooperative_two_user(s);
        if (st.infeasible || nc.infeasible)
            continue;
        ++compared;
        const double total = s.user(0).beta() + s.user(1).beta();
        CHECK(total - st.bs_utility >= -1e-7);
        CHECK(st.bs_utility - nc.bs_utility > -1e-7);
        CHECK(nc.bs_utility > 0);
    }
    CHECK(compared > 0);
}

TEST_CASE("centralized optimum")
{
    const auto s = testing::fig_defaults(9);
    const auto c = centralized(s);
    CHECK(c.bs_utility == doctest::Approx(4.5));
    CHECK(c.poa.value == 1.0);
    CHECK(c.induced.statistics.k_cc == 9);
}

TEST_CASE("kss_integral_reading")
{
    const auto s = testing::fig_defaults(9);
    UtilityEngine engine(s.system);
    const auto b = kstar_upper_bound(s);
    const double ww = engine.unconditional({0, 0}, s.user(), s.user());
    CHECK(s.user().lambda() * b.integral == doctest::Approx(ww).epsilon(1e-9));
    CHECK(b.floor == doctest::Approx(5.0));
    CHECK(b.kss >= find_kstar_nstar(s, 200, engine).kstar);
    CHECK(b.kss == static_cast<int>(std::ceil(std::max(b.floor, b.k_plus) - 1e-7)));

    CHECK_THROWS_AS(kstar_upper_bound(s.with_v(0.0)), ValidationError);
}
