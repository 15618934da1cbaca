// SPDX-License-Identifier: Apache-2.0
//
// Pure-strategy Bayes-Nash equilibria of the two-user game and of the
// symmetric n-user game, plus a definition-based deviation checker.
#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "dynoffset/model.hpp"
#include "dynoffset/utility.hpp"

namespace dynoffset
{

//! One inequality `lhs >= rhs` or `lhs <= rhs`; margin is the signed slack,
//! non-negative when the inequality holds exactly.
struct Condition
{
    std::string description;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

Condition at_least(std::string description, double lhs, double rhs);
Condition at_most(std::string description, double lhs, double rhs);

struct EquilibriumCertificate
{
    bool two_user = false;
    std::array<Policy, 2> policies{Policy::WW, Policy::WW};  //!< two-user
    PolicyStatistics statistics;                            //!< symmetric
    std::vector<Condition> conditions;
    std::vector<std::string> case_labels;

    //! Every margin >= -tol.
    bool holds(double tol) const;
    double min_margin() const;
    std::string profile_string() const;
};

struct DeviationReport
{
    bool passed = true;
    std::vector<Condition> conditions;
};

//! Every profile among the nine candidates whose equilibrium condition
//! holds, in the order (CC,CC), (CC,WC), ..., (WW,WW) labelled a..i.
//! Throws ConsistencyError if none holds.
std::vector<EquilibriumCertificate>
two_user_equilibria(const Scenario& scenario, const UtilityEngine& engine);
std::vector<EquilibriumCertificate>
two_user_equilibria(const Scenario& scenario);

//! Scan k_cc ascending, then k_wc ascending, and keep every statistics
//! vector whose family condition (a..f or "extra") holds.
//! Throws ConsistencyError if none holds.
std::vector<EquilibriumCertificate>
multi_user_equilibria(const Scenario& scenario, const UtilityEngine& engine);
std::vector<EquilibriumCertificate>
multi_user_equilibria(const Scenario& scenario);

//! Two-user or symmetric equilibria depending on the scenario mode.
std::vector<EquilibriumCertificate>
enumerate_equilibria(const Scenario& scenario, const UtilityEngine& engine);

/*!
 * Per-state best-response check: in every state of positive probability,
 * each player's action must be at least as good as the other action.
 * States of probability zero are skipped.
 */
DeviationReport check_no_deviation(const std::array<Policy, 2>& policies,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine);
DeviationReport check_no_deviation(const PolicyStatistics& statistics,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine);
DeviationReport check_no_deviation(const EquilibriumCertificate& certificate,
                                   const Scenario& scenario,
                                   const UtilityEngine& engine);

//! All (k_cc, k_wc) that pass check_no_deviation, in scan order.
std::vector<PolicyStatistics>
brute_force_equilibria(const Scenario& scenario, const UtilityEngine& engine);

struct PolicyUsage
{
    std::set<Policy> used;
    //! psi == 0: only the good state exists, so CC and WC coincide and are
    //! both reported as WC.
    bool single_state = false;
    std::vector<EquilibriumCertificate> equilibria;
};

PolicyUsage limiting_policy_usage(const Scenario& scenario, double psi,
                                  const UtilityEngine& engine);

}  // namespace dynoffset
