// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo brute force of the analytic quantities: sample gains and
// demands, apply policies, average realized throughputs.
#pragma once

#include <cstdint>
#include <vector>

#include "dynoffset/model.hpp"
#include "dynoffset/utility.hpp"

namespace dynoffset
{

struct McEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

//! Realized per-user rates of one draw. actions: 1 = 3G, 0 = WiFi;
//! demands: 1 = active. Idle users get 0, active WiFi users get v.
std::vector<double> simulate_throughput(const std::vector<double>& gains,
                                        const std::vector<int>& actions,
                                        const std::vector<int>& demands,
                                        const SystemParams& sys);

//! Rate at own gain h against k.cc CC and k.wc WC opponents drawn from opp.
McEstimate estimate_c_multi(double h, Opponents k, const UserProfile& opp,
                            const SystemParams& sys, std::int64_t samples,
                            std::uint64_t seed, std::uint64_t stream = 0);

//! Conditional utility with the own gain drawn from the conditioned law.
//! Throws EmptyConditioningError below probability 1e-6.
McEstimate estimate_conditional(Opponents k, Conditioning c,
                                const UserProfile& self, const UserProfile& opp,
                                const SystemParams& sys, std::int64_t samples,
                                std::uint64_t seed, std::uint64_t stream = 0);

//! Expected number of demanding users whose realized action is 3G.
McEstimate estimate_bs_utility(const PolicyStatistics& statistics,
                               const UserProfile& user, std::int64_t samples,
                               std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace dynoffset
