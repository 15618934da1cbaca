// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <algorithm>
#include <set>
#include <utility>

#include "dynoffset/equilibrium.hpp"
#include "dynoffset/errors.hpp"
#include "support.hpp"

using namespace dynoffset;

namespace
{

using Profile = std::array<Policy, 2>;

std::set<std::pair<int, int>> found_set(
    const std::vector<EquilibriumCertificate>& certs)
{
    std::set<std::pair<int, int>> out;
    for (const auto& c : certs)
    {
        if (c.two_user)
            out.emplace(static_cast<int>(c.policies[0]),
                        static_cast<int>(c.policies[1]));
        else
            out.emplace(c.statistics.k_cc, c.statistics.k_wc);
    }
    return out;
}

std::set<std::pair<int, int>> brute_force_pair(const Scenario& s,
                                               const UtilityEngine& engine)
{
    std::set<std::pair<int, int>> out;
    for (Policy a : all_policies)
    {
        for (Policy b : all_policies)
        {
            if (check_no_deviation(Profile{a, b}, s, engine).passed)
                out.emplace(static_cast<int>(a), static_cast<int>(b));
        }
    }
    return out;
}

bool contains(const std::vector<EquilibriumCertificate>& certs, Profile p)
{
    return std::any_of(certs.begin(), certs.end(), [&](const auto& c) {
        return c.policies == p;
    });
}

bool contains(const std::vector<EquilibriumCertificate>& certs, int k_cc,
              int k_wc)
{
    return std::any_of(certs.begin(), certs.end(), [&](const auto& c) {
        return c.statistics.k_cc == k_cc && c.statistics.k_wc == k_wc;
    });
}

}  // namespace

TEST_CASE("two-user extremes of v")
{
    const auto s = testing::pair({0.6, 0.5, 1.0}, {1.2, 0.5, 1.0}, 1e6);
    UtilityEngine engine(s.system);
    const auto high = two_user_equilibria(s, engine);
    CHECK(contains(high, {Policy::WW, Policy::WW}));
    CHECK(high.front().case_labels.front() == "i");

    const auto low = two_user_equilibria(s.with_v(0.0), engine);
    CHECK(contains(low, {Policy::CC, Policy::CC}));
    CHECK(low.front().case_labels.front() == "a");
}

TEST_CASE("two-user reference pair matches the deviation oracle")
{
    const auto s = testing::pair({0.6, 0.5, 1.0}, {1.2, 0.5, 1.0}, 0.25);
    UtilityEngine engine(s.system);
    const auto certs = two_user_equilibria(s, engine);
    CHECK(found_set(certs) == brute_force_pair(s, engine));
    for (const auto& c : certs)
    {
        CHECK(c.holds(s.root_tol));
        CHECK(c.profile_string().front() == '(');
    }
}

TEST_CASE("two-user soundness and completeness on random pairs")
{
    testing::ScenarioSampler sample(21);
    for (int i = 0; i < 40; ++i)
    {
        const auto s = sample.pair_scenario();
        UtilityEngine engine(s.system);
        const auto certs = two_user_equilibria(s, engine);
        REQUIRE_FALSE(certs.empty());
        for (const auto& c : certs)
            CHECK(check_no_deviation(c, s, engine).passed);
        CHECK(found_set(certs) == brute_force_pair(s, engine));
    }
}

TEST_CASE("symmetric extremes of v")
{
    const auto s = testing::fig_defaults(6);
    UtilityEngine engine(s.system);
    CHECK(contains(multi_user_equilibria(s.with_v(1e6), engine), 0, 0));
    CHECK(contains(multi_user_equilibria(s.with_v(0.0), engine), 6, 0));
}

TEST_CASE("symmetric completeness for small n")
{
    testing::ScenarioSampler sample(22);
    for (int i = 0; i < 8; ++i)
    {
        const auto base = sample.symmetric_scenario(2);
        UtilityEngine engine(base.system);
        for (int n = 2; n <= 6; ++n)
        {
            const auto s = base.with_n(n);
            const auto certs = multi_user_equilibria(s, engine);
            std::set<std::pair<int, int>> brute;
            for (const auto& k : brute_force_equilibria(s, engine))
                brute.emplace(k.k_cc, k.k_wc);
            CHECK(found_set(certs) == brute);
            for (const auto& c : certs)
                CHECK(check_no_deviation(c, s, engine).passed);
        }
    }
}

TEST_CASE("reference scenario at n = 5")
{
    const auto s = testing::fig_defaults(5);
    UtilityEngine engine(s.system);
    const auto certs = multi_user_equilibria(s, engine);
    std::set<std::pair<int, int>> brute;
    for (const auto& k : brute_force_equilibria(s, engine))
        brute.emplace(k.k_cc, k.k_wc);
    CHECK(found_set(certs) == brute);
    const bool cc_ok = engine.value({4, 0}, Conditioning::Bad, s.user(), s.user())
                       >= s.system.v;
    CHECK(contains(certs, 5, 0) == cc_ok);
}

TEST_CASE("deviation checker examples")
{
    const auto s = testing::fig_defaults(4).with_v(1e6);
    UtilityEngine engine(s.system);
    CHECK(check_no_deviation(make_policy_statistics(0, 0, 4), s, engine).passed);

    const auto report
        = check_no_deviation(make_policy_statistics(4, 0, 4), s, engine);
    CHECK_FALSE(report.passed);
    const auto worst = std::min_element(
        report.conditions.begin(), report.conditions.end(),
        [](const auto& a, const auto& b) { return a.margin < b.margin; });
    const double c0 = engine.value({3, 0}, Conditioning::Bad, s.user(), s.user());
    CHECK(worst->margin == doctest::Approx(c0 - 1e6));
}

TEST_CASE("deviation checker skips empty states")
{
    const auto s = testing::fig_defaults(3, 0.0);
    UtilityEngine engine(s.system);
    // At psi = 0 the bad state never occurs, so CC and WC are equivalent.
    const auto cc = check_no_deviation(make_policy_statistics(3, 0, 3), s, engine);
    const auto wc = check_no_deviation(make_policy_statistics(0, 3, 3), s, engine);
    CHECK(cc.passed == wc.passed);
}

TEST_CASE("limiting policy usage")
{
    const auto s = testing::fig_defaults(5);
    UtilityEngine engine(s.system);
    const auto& u = s.user();

    double small = 1.0;
    while (engine.value({0, 0}, Conditioning::Bad, u.with_psi(small),
                        u.with_psi(small))
           >= s.system.v)
        small /= 2;
    const auto low = limiting_policy_usage(s, small, engine);
    CHECK_FALSE(low.used.count(Policy::CC));
    CHECK_FALSE(low.single_state);

    double large = 1.0;
    while (engine.value({4, 0}, Conditioning::Bad, u.with_psi(large),
                        u.with_psi(large))
           <= s.system.v)
    {
        large *= 2;
        REQUIRE(large < 1e3);
    }
    const auto high = limiting_policy_usage(s, large, engine);
    CHECK_FALSE(high.used.count(Policy::WW));

    const auto zero = limiting_policy_usage(s, 0.0, engine);
    CHECK(zero.single_state);
    CHECK_FALSE(zero.used.count(Policy::CC));
    CHECK_FALSE(zero.equilibria.empty());
}

TEST_CASE("equilibria with idle players survive larger games")
{
    testing::ScenarioSampler sample(23);
    int checked = 0;
    for (int i = 0; i < 15; ++i)
    {
        const auto s = sample.symmetric_scenario(6);
        UtilityEngine engine(s.system);
        for (const auto& c : multi_user_equilibria(s, engine))
        {
            const auto& k = c.statistics;
            if (k.k_ww() == 0)
                continue;
            const int active = k.k_cc + k.k_wc;
            for (int m = std::max(active, 2); m <= active + 5; ++m)
            {
                const auto sm = s.with_n(m);
                CHECK(check_no_deviation(
                          make_policy_statistics(k.k_cc, k.k_wc, m), sm, engine)
                          .passed);
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("WC-only good-state utility eventually stays below v")
{
    const auto s = testing::fig_defaults(2);
    UtilityEngine engine(s.system);
    const auto& u = s.user();
    std::vector<double> seq;
    for (int n = 1; n <= 80; ++n)
        seq.push_back(engine.value({0, n - 1}, Conditioning::Good, u, u));
    for (std::size_t i = 1; i < seq.size(); ++i)
        CHECK(seq[i] < seq[i - 1]);
    const auto first_below = std::find_if(seq.begin(), seq.end(), [&](double c) {
        return c < s.system.v;
    });
    REQUIRE(first_below != seq.end());
    CHECK(std::all_of(first_below, seq.end(),
                      [&](double c) { return c < s.system.v; }));
}

TEST_CASE("certificate helpers")
{
    const auto c = at_least("x", 1.0, 0.5);
    CHECK(c.margin == 0.5);
    const auto d = at_most("y", 1.0, 0.5);
    CHECK(d.margin == -0.5);
    EquilibriumCertificate cert;
    cert.conditions = {c, d};
    CHECK(cert.min_margin() == -0.5);
    CHECK_FALSE(cert.holds(1e-7));
    CHECK(cert.holds(0.6));
}
