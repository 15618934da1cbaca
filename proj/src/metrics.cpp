// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/metrics.hpp"

#include <cmath>
#include <limits>

#include "dynoffset/equilibrium.hpp"
#include "dynoffset/errors.hpp"

namespace dynoffset
{

double bs_utility(const PolicyStatistics& statistics, const UserProfile& user)
{
    return user.beta() * (statistics.k_cc + user.alpha() * statistics.k_wc);
}

double bs_utility(const std::array<Policy, 2>& policies,
                  const UserProfile& user1, const UserProfile& user2)
{
    auto one = [](Policy p, const UserProfile& u) {
        switch (p)
        {
            case Policy::CC:
                return u.beta();
            case Policy::WC:
                return u.beta() * u.alpha();
            case Policy::WW:
                break;
        }
        return 0.0;
    };
    return one(policies[0], user1) + one(policies[1], user2);
}

double bs_utility(const EquilibriumCertificate& certificate,
                  const Scenario& scenario)
{
    if (certificate.two_user)
    {
        return bs_utility(certificate.policies, scenario.user(0),
                          scenario.user(1));
    }
    return bs_utility(certificate.statistics, scenario.user());
}

double optimal_bs_utility(const Scenario& scenario)
{
    if (scenario.two_user())
        return scenario.user(0).beta() + scenario.user(1).beta();
    return scenario.n * scenario.user().beta();
}

PriceOfAnarchy price_of_anarchy(double achieved, double optimum)
{
    if (achieved > 0)
        return {optimum / achieved, false};
    if (optimum == 0)
        return {1.0, false};
    return {std::numeric_limits<double>::infinity(), true};
}

LoadSummary system_loads(const PolicyStatistics& statistics,
                         const UserProfile& user)
{
    if (statistics.n <= 0)
        throw ValidationError({"loads need n >= 1"});
    LoadSummary out;
    out.n = statistics.n;
    out.statistics = statistics;
    out.psi = user.psi();
    out.load_3g = (statistics.k_cc + statistics.k_wc * user.alpha())
                  / statistics.n;
    out.load_wifi = 1.0 - out.load_3g;
    return out;
}

DemandWeightedLoads demand_weighted_loads(const PolicyStatistics& statistics,
                                          const UserProfile& user)
{
    const auto base = system_loads(statistics, user);
    return {user.beta() * base.load_3g, user.beta() * base.load_wifi,
            1.0 - user.beta()};
}

}  // namespace dynoffset
