// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/equilibrium.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "dynoffset/errors.hpp"

namespace dynoffset
{

namespace
{
std::string state_name(State s)
{
    return s == State::Bad ? "0" : "1";
}

std::string symmetric_name(Opponents k, State s)
{
    return "C_[" + std::to_string(k.cc) + ";" + std::to_string(k.wc) + "]("
           + state_name(s) + ")";
}

std::string two_user_name(int user, Policy opp, State s)
{
    return "C^" + std::to_string(user + 1) + "_" + std::string(to_string(opp))
           + "(" + state_name(s) + ")";
}

bool state_possible(const UserProfile& u, State s)
{
    return s == State::Bad ? u.bad_probability() > 0 : u.alpha() > 0;
}

//! Accumulates conditions and stops evaluating once one fails.
class ConditionList
{
  public:
    explicit ConditionList(double tol) : tol_(tol) {}

    template<class F>
    ConditionList& ge(const std::string& name, F&& lhs, double rhs)
    {
        if (ok_)
            push(at_least(name + " >= v", lhs(), rhs));
        return *this;
    }

    template<class F>
    ConditionList& le(const std::string& name, F&& lhs, double rhs)
    {
        if (ok_)
            push(at_most(name + " <= v", lhs(), rhs));
        return *this;
    }

    bool ok() const { return ok_; }
    std::vector<Condition> take() { return std::move(conditions_); }

  private:
    void push(Condition c)
    {
        ok_ = c.margin >= -tol_;
        conditions_.push_back(std::move(c));
    }

    double tol_;
    bool ok_ = true;
    std::vector<Condition> conditions_;
};

constexpr Policy label_order[] = {Policy::CC, Policy::WC, Policy::WW};
}  // namespace

Condition at_least(std::string description, double lhs, double rhs)
{
    return {std::move(description), lhs, rhs, lhs - rhs};
}

Condition at_most(std::string description, double lhs, double rhs)
{
    return {std::move(description), lhs, rhs, rhs - lhs};
}

bool EquilibriumCertificate::holds(double tol) const
{
    return min_margin() >= -tol;
}

double EquilibriumCertificate::min_margin() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : conditions)
        m = std::min(m, c.margin);
    return m;
}

std::string EquilibriumCertificate::profile_string() const
{
    if (two_user)
    {
        return "(" + std::string(to_string(policies[0])) + ";"
               + std::string(to_string(policies[1])) + ")";
    }
    return "[" + std::to_string(statistics.k_cc) + ";"
           + std::to_string(statistics.k_wc) + "]/"
           + std::to_string(statistics.n);
}

//---------------------------------------------------------------------------//
std::vector<EquilibriumCertificate>
two_user_equilibria(const Scenario& scenario, const UtilityEngine& engine)
{
    if (!scenario.two_user())
        throw ValidationError({"two-user equilibria need a two-user scenario"});
    const double v = scenario.system.v;
    std::vector<EquilibriumCertificate> out;
    int label = 0;
    for (Policy p1 : label_order)
    {
        for (Policy p2 : label_order)
        {
            const std::array<Policy, 2> profile{p1, p2};
            ConditionList list(scenario.root_tol);
            for (int i = 0; i < 2 && list.ok(); ++i)
            {
                const Policy opp = profile[1 - i];
                auto value = [&, i, opp](State s) {
                    return [&, i, opp, s] {
                        return engine.conditional(opponents_of(opp), s,
                                                  scenario.user(i),
                                                  scenario.user(1 - i));
                    };
                };
                switch (profile[i])
                {
                    case Policy::CC:
                        list.ge(two_user_name(i, opp, State::Bad),
                                value(State::Bad), v);
                        break;
                    case Policy::WC:
                        list.le(two_user_name(i, opp, State::Bad),
                                value(State::Bad), v)
                            .ge(two_user_name(i, opp, State::Good),
                                value(State::Good), v);
                        break;
                    case Policy::WW:
                        list.le(two_user_name(i, opp, State::Good),
                                value(State::Good), v);
                        break;
                }
            }
            if (list.ok())
            {
                EquilibriumCertificate cert;
                cert.two_user = true;
                cert.policies = profile;
                cert.statistics = make_policy_statistics(
                    static_cast<int>(std::count(profile.begin(), profile.end(),
                                                Policy::CC)),
                    static_cast<int>(std::count(profile.begin(), profile.end(),
                                                Policy::WC)),
                    2);
                cert.conditions = list.take();
                cert.case_labels.emplace_back(1, static_cast<char>('a' + label));
                out.push_back(std::move(cert));
            }
            ++label;
        }
    }
    if (out.empty())
        throw ConsistencyError("no two-user equilibrium satisfies its condition");
    return out;
}

std::vector<EquilibriumCertificate>
two_user_equilibria(const Scenario& scenario)
{
    return two_user_equilibria(
        scenario, UtilityEngine(scenario.system, scenario.quad_tol));
}

std::vector<EquilibriumCertificate>
multi_user_equilibria(const Scenario& scenario, const UtilityEngine& engine)
{
    if (scenario.two_user())
        throw ValidationError({"symmetric equilibria need a symmetric scenario"});
    const int n = scenario.n;
    const double v = scenario.system.v;
    const auto& u = scenario.user();
    auto value = [&](int cc, int wc, State s) {
        return [&, cc, wc, s] {
            return engine.conditional({cc, wc}, s, u, u);
        };
    };
    auto name = [](int cc, int wc, State s) {
        return symmetric_name({cc, wc}, s);
    };
    constexpr State bad = State::Bad;
    constexpr State good = State::Good;

    std::vector<EquilibriumCertificate> out;
    for (int k = 0; k <= n; ++k)
    {
        for (int l = 0; k + l <= n; ++l)
        {
            ConditionList list(scenario.root_tol);
            std::string label;
            if (k == 0 && l == 0)
            {
                label = "a";
                list.le(name(0, 0, good), value(0, 0, good), v);
            }
            else if (k == 0 && l < n)
            {
                label = "b";
                list.ge(name(0, l - 1, good), value(0, l - 1, good), v)
                    .le(name(0, l, good), value(0, l, good), v)
                    .le(name(0, l - 1, bad), value(0, l - 1, bad), v);
            }
            else if (k == 0)
            {
                label = "c";
                list.ge(name(0, n - 1, good), value(0, n - 1, good), v)
                    .le(name(0, n - 1, bad), value(0, n - 1, bad), v);
            }
            else if (k == n)
            {
                label = "e";
                list.ge(name(n - 1, 0, bad), value(n - 1, 0, bad), v);
            }
            else if (l == 0)
            {
                // k CC players face [k-1, 0]; WW players face [k, 0].
                label = "f";
                list.ge(name(k - 1, 0, bad), value(k - 1, 0, bad), v)
                    .le(name(k, 0, good), value(k, 0, good), v);
            }
            else if (k + l == n)
            {
                label = "d";
                list.ge(name(k, l - 1, good), value(k, l - 1, good), v)
                    .ge(name(k - 1, l, bad), value(k - 1, l, bad), v)
                    .le(name(k, l - 1, bad), value(k, l - 1, bad), v);
            }
            else
            {
                label = "extra";
                list.ge(name(k - 1, l, bad), value(k - 1, l, bad), v)
                    .ge(name(k, l - 1, good), value(k, l - 1, good), v)
                    .le(name(k, l, good), value(k, l, good), v)
                    .le(name(k, l - 1, bad), value(k, l - 1, bad), v);
            }
            if (!list.ok())
                continue;
            const auto stats = make_policy_statistics(k, l, n);
            auto same = std::find_if(out.begin(), out.end(), [&](const auto& c) {
                return c.statistics == stats;
            });
            if (same != out.end())
            {
                same->case_labels.push_back(label);
                continue;
            }
            EquilibriumCertificate cert;
            cert.statistics = stats;
            cert.conditions = list.take();
            cert.case_labels.push_back(label);
            out.push_back(std::move(cert));
        }
    }
    if (out.empty())
        throw ConsistencyError("no symmetric equilibrium satisfies its condition");
    return out;
}

std::vector<EquilibriumCertificate>
multi_user_equilibria(const Scenario& scenario)
{
    return multi_user_equilibria(
        scenario, UtilityEngine(scenario.system, scenario.quad_tol));
}

std::vector<EquilibriumCertificate>
enumerate_equilibria(const Scenario& scenario, const UtilityEngine& engine)
{
    return scenario.two_user() ? two_user_equilibria(scenario, engine)
                               : multi_user_equilibria(scenario, engine);
}

//---------------------------------------------------------------------------//
DeviationReport check_no_deviation(const std::array<Policy, 2>& policies,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine)
{
    if (!scenario.two_user())
        throw ValidationError({"policy pairs need a two-user scenario"});
    const double v = scenario.system.v;
    DeviationReport report;
    for (int i = 0; i < 2; ++i)
    {
        const auto& self = scenario.user(i);
        const Policy opp = policies[1 - i];
        for (State s : {State::Bad, State::Good})
        {
            if (!state_possible(self, s))
                continue;
            const double c = engine.conditional(opponents_of(opp), s, self,
                                                scenario.user(1 - i));
            auto name = two_user_name(i, opp, s);
            report.conditions.push_back(
                action(policies[i], s) == Action::Cellular
                    ? at_least(name + " >= v", c, v)
                    : at_most(name + " <= v", c, v));
        }
    }
    for (const auto& c : report.conditions)
        report.passed = report.passed && c.margin >= -scenario.root_tol;
    return report;
}

DeviationReport check_no_deviation(const PolicyStatistics& statistics,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine)
{
    if (scenario.two_user())
        throw ValidationError({"policy statistics need a symmetric scenario"});
    if (statistics.n != scenario.n)
        throw ValidationError({"policy statistics do not match n"});
    const double v = scenario.system.v;
    const auto& u = scenario.user();
    DeviationReport report;
    auto check = [&](Policy own, int count) {
        if (count <= 0)
            return;
        const Opponents k = statistics.without(own);
        for (State s : {State::Bad, State::Good})
        {
            if (!state_possible(u, s))
                continue;
            const double c = engine.conditional(k, s, u, u);
            auto name = std::string(to_string(own)) + " player: "
                        + symmetric_name(k, s);
            report.conditions.push_back(
                action(own, s) == Action::Cellular
                    ? at_least(name + " >= v", c, v)
                    : at_most(name + " <= v", c, v));
        }
    };
    check(Policy::CC, statistics.k_cc);
    check(Policy::WC, statistics.k_wc);
    check(Policy::WW, statistics.k_ww());
    for (const auto& c : report.conditions)
        report.passed = report.passed && c.margin >= -scenario.root_tol;
    return report;
}

DeviationReport check_no_deviation(const EquilibriumCertificate& certificate,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine)
{
    return certificate.two_user
               ? check_no_deviation(certificate.policies, scenario, engine)
               : check_no_deviation(certificate.statistics, scenario, engine);
}

std::vector<PolicyStatistics>
brute_force_equilibria(const Scenario& scenario, const UtilityEngine& engine)
{
    std::vector<PolicyStatistics> out;
    for (int k = 0; k <= scenario.n; ++k)
    {
        for (int l = 0; k + l <= scenario.n; ++l)
        {
            const auto stats = make_policy_statistics(k, l, scenario.n);
            if (check_no_deviation(stats, scenario, engine).passed)
                out.push_back(stats);
        }
    }
    return out;
}

PolicyUsage limiting_policy_usage(const Scenario& scenario, double psi,
                                  const UtilityEngine& engine)
{
    const Scenario at = scenario.with_psi(psi);
    PolicyUsage usage;
    usage.single_state = psi == 0;
    usage.equilibria = enumerate_equilibria(at, engine);
    for (const auto& cert : usage.equilibria)
    {
        auto add = [&](Policy p) {
            usage.used.insert(usage.single_state && p == Policy::CC ? Policy::WC
                                                                    : p);
        };
        if (cert.two_user)
        {
            add(cert.policies[0]);
            add(cert.policies[1]);
            continue;
        }
        if (cert.statistics.k_cc > 0)
            add(Policy::CC);
        if (cert.statistics.k_wc > 0)
            add(Policy::WC);
        if (cert.statistics.k_ww() > 0)
            add(Policy::WW);
    }
    return usage;
}

}  // namespace dynoffset
