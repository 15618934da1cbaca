// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynoffset/errors.hpp"

namespace dynoffset
{

namespace
{
std::string join(const std::vector<std::string>& parts)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        os << (i ? "; " : "") << parts[i];
    }
    return os.str();
}

void check_user(const std::string& prefix, double lambda, double beta,
                double psi, std::vector<std::string>& problems)
{
    if (!std::isfinite(lambda) || !(lambda > 0))
        problems.push_back(prefix + "lambda must be positive and finite");
    if (!std::isfinite(beta) || beta < 0 || beta > 1)
        problems.push_back(prefix + "beta must lie in [0, 1]");
    if (!std::isfinite(psi) || psi < 0)
        problems.push_back(prefix + "psi must be non-negative and finite");
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join(problems)), problems_(std::move(problems))
{
}

SystemParams make_system_params(double p, double sigma2, double v)
{
    std::vector<std::string> problems;
    if (!std::isfinite(p) || p < 0)
        problems.emplace_back("p must be non-negative and finite");
    if (!std::isfinite(sigma2) || !(sigma2 > 0))
        problems.emplace_back("sigma2 must be positive");
    if (!std::isfinite(v) || v < 0)
        problems.emplace_back("v must be non-negative and finite");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return {p, sigma2, v};
}

double UserProfile::alpha() const
{
    return std::exp(-lambda_ * psi_);
}

double UserProfile::bad_probability() const
{
    return -std::expm1(-lambda_ * psi_);
}

UserProfile UserProfile::with_psi(double psi) const
{
    return make_user_profile(lambda_, beta_, psi);
}

UserProfile UserProfile::with_beta(double beta) const
{
    return make_user_profile(lambda_, beta, psi_);
}

UserProfile make_user_profile(double lambda, double beta, double psi)
{
    std::vector<std::string> problems;
    check_user("", lambda, beta, psi, problems);
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return UserProfile(lambda, beta, psi);
}

Policy make_policy(Action bad_state, Action good_state)
{
    if (bad_state == Action::WiFi)
        return good_state == Action::WiFi ? Policy::WW : Policy::WC;
    if (good_state == Action::Cellular)
        return Policy::CC;
    throw ValidationError({"policy (C, W) is irrational and not allowed"});
}

Action action(Policy policy, State state)
{
    switch (policy)
    {
        case Policy::WW:
            return Action::WiFi;
        case Policy::CC:
            return Action::Cellular;
        case Policy::WC:
            break;
    }
    return state == State::Good ? Action::Cellular : Action::WiFi;
}

std::string_view to_string(Policy policy)
{
    switch (policy)
    {
        case Policy::WW:
            return "WW";
        case Policy::WC:
            return "WC";
        case Policy::CC:
            return "CC";
    }
    return "??";
}

std::optional<Policy> parse_policy(std::string_view text)
{
    for (Policy p : all_policies)
    {
        if (to_string(p) == text)
            return p;
    }
    return std::nullopt;
}

Opponents opponents_of(Policy policy)
{
    switch (policy)
    {
        case Policy::CC:
            return {1, 0};
        case Policy::WC:
            return {0, 1};
        case Policy::WW:
            break;
    }
    return {0, 0};
}

Opponents PolicyStatistics::without(Policy own) const
{
    Opponents o{k_cc, k_wc};
    if (own == Policy::CC)
        --o.cc;
    else if (own == Policy::WC)
        --o.wc;
    return o;
}

PolicyStatistics make_policy_statistics(int k_cc, int k_wc, int n)
{
    std::vector<std::string> problems;
    if (k_cc < 0 || k_wc < 0)
        problems.emplace_back("policy counts must be non-negative");
    if (k_cc + k_wc > n)
        problems.emplace_back("k_cc + k_wc must not exceed n");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return {k_cc, k_wc, n};
}

Scenario Scenario::with_psi(double psi) const
{
    Scenario s = *this;
    for (auto& u : s.users)
        u = u.with_psi(psi);
    return s;
}

Scenario Scenario::with_v(double v) const
{
    Scenario s = *this;
    s.system = make_system_params(system.p, system.sigma2, v);
    return s;
}

Scenario Scenario::with_n(int n) const
{
    if (two_user() || n < 2)
        throw ValidationError({"at least two players in a symmetric scenario"});
    Scenario s = *this;
    s.n = n;
    return s;
}

Scenario validate_scenario(const RawScenario& raw)
{
    std::vector<std::string> problems;
    if (!std::isfinite(raw.p) || raw.p < 0)
        problems.emplace_back("p must be non-negative and finite");
    if (!std::isfinite(raw.sigma2) || !(raw.sigma2 > 0))
        problems.emplace_back("sigma2 must be positive");
    if (!std::isfinite(raw.v) || raw.v < 0)
        problems.emplace_back("v must be non-negative and finite");
    if (raw.n < 2)
        problems.emplace_back("at least two players are required (n >= 2)");
    if (raw.users.empty() || raw.users.size() > 2)
        problems.emplace_back("expected one symmetric user or two users");
    if (raw.users.size() == 2 && raw.n != 2)
        problems.emplace_back("two-user mode requires n = 2");
    for (std::size_t i = 0; i < raw.users.size(); ++i)
    {
        std::string prefix = raw.users.size() == 2
                                 ? "user " + std::to_string(i + 1) + ": "
                                 : "";
        check_user(prefix, raw.users[i].lambda, raw.users[i].beta,
                   raw.users[i].psi, problems);
    }
    if (!std::isfinite(raw.quad_tol) || !(raw.quad_tol > 0))
        problems.emplace_back("quad_tol must be positive");
    if (!std::isfinite(raw.root_tol) || !(raw.root_tol > 0))
        problems.emplace_back("root_tol must be positive");
    if (raw.psi_max && (!std::isfinite(*raw.psi_max) || !(*raw.psi_max > 0)))
        problems.emplace_back("psi_max must be positive");
    if (!problems.empty())
        throw ValidationError(std::move(problems));

    Scenario s;
    s.system = {raw.p, raw.sigma2, raw.v};
    s.n = raw.n;
    double min_lambda = raw.users.front().lambda;
    for (const auto& u : raw.users)
    {
        s.users.push_back(make_user_profile(u.lambda, u.beta, u.psi));
        min_lambda = std::min(min_lambda, u.lambda);
    }
    s.quad_tol = raw.quad_tol;
    s.root_tol = raw.root_tol;
    s.psi_max = raw.psi_max.value_or(50.0 / min_lambda);
    s.seed = raw.seed;
    return s;
}

}  // namespace dynoffset
