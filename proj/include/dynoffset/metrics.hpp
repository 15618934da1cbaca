// SPDX-License-Identifier: Apache-2.0
//
// Base-station utility, price of anarchy and system loads.
#pragma once

#include <array>

#include "dynoffset/model.hpp"

namespace dynoffset
{

struct EquilibriumCertificate;

//! beta (k_cc + e^{-lambda psi} k_wc), psi taken from the profile.
double bs_utility(const PolicyStatistics& statistics, const UserProfile& user);
//! Sum over users of beta_i (1{CC} + e^{-lambda_i psi_i} 1{WC}).
double bs_utility(const std::array<Policy, 2>& policies,
                  const UserProfile& user1, const UserProfile& user2);
double bs_utility(const EquilibriumCertificate& certificate,
                  const Scenario& scenario);

//! Centralized optimum: n beta, or beta1 + beta2 in two-user mode.
double optimal_bs_utility(const Scenario& scenario);

struct PriceOfAnarchy
{
    double value = 1.0;
    bool infinite = false;
};

//! optimum / achieved; 0 / 0 counts as 1, x / 0 as infinite.
PriceOfAnarchy price_of_anarchy(double achieved, double optimum);

struct LoadSummary
{
    double load_3g = 0.0;
    double load_wifi = 0.0;
    int n = 0;
    PolicyStatistics statistics;
    double psi = 0.0;
};

//! load_3g = (k_cc + k_wc alpha) / n, load_wifi = 1 - load_3g.
LoadSummary system_loads(const PolicyStatistics& statistics,
                         const UserProfile& user);

//! Not the slot-counting formula above: shares of all users that are
//! demanding and on 3G, demanding and on WiFi, or idle. Sums to 1.
struct DemandWeightedLoads
{
    double on_3g = 0.0;
    double on_wifi = 0.0;
    double idle = 0.0;
};

DemandWeightedLoads demand_weighted_loads(const PolicyStatistics& statistics,
                                          const UserProfile& user);

}  // namespace dynoffset
