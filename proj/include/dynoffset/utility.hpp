// SPDX-License-Identifier: Apache-2.0
//
// Channel utilities of a user on 3G: pointwise rates c(h) against a set of
// opponents, and their conditional expectations C(0), C(1), C(inf) over the
// user's own exponential gain.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dynoffset/model.hpp"

namespace dynoffset
{

//! Which part of the own-gain law an expectation is taken over.
enum class Conditioning
{
    Bad,   //!< h < psi, normalised by 1 - alpha
    Good,  //!< h > psi, normalised by alpha
    Full,  //!< whole Exp(lambda) law
};

Conditioning conditioning_of(State state);
std::string_view to_string(Conditioning c);

//---------------------------------------------------------------------------//
// Pointwise rates
//---------------------------------------------------------------------------//

//! log(1 + p h / sigma2): no interference.
double c_ww(double h, const SystemParams& sys);

//! Rate against one CC opponent.
double c_cc_two_user(double h, const UserProfile& opp, const SystemParams& sys,
                     double tol = 1e-9);

//! Rate against one WC opponent: interference only when the opponent
//! demands and its gain exceeds its threshold.
double c_wc_two_user(double h, const UserProfile& opp, const SystemParams& sys,
                     double tol = 1e-9);

//! E[log(1 + p h / (sigma2 + p (shift + G)))] with G ~ Erlang(m, lambda);
//! m == 0 means G == 0.
double erlang_interference_expectation(double h, int m, double shift,
                                       double lambda, const SystemParams& sys,
                                       double tol = 1e-9);

//! Rate against k.cc CC and k.wc WC opponents, all distributed as `opp`,
//! evaluated as the binomial triple sum over demanding CC opponents r,
//! demanding WC opponents q, and those of them above threshold v.
double c_multi(double h, Opponents k, const UserProfile& opp,
               const SystemParams& sys, double tol = 1e-9);

//! Binomial coefficient; exact below 61, log-space beyond.
double binomial_coefficient(int n, int k);
//! Bin(n, prob) mass at k, exact at prob in {0, 1}.
double binomial_pmf(int n, int k, double prob);

//---------------------------------------------------------------------------//
// Expected utilities
//---------------------------------------------------------------------------//

/*!
 * E[c_K(h) | h in set(state)] for the user `self` against opponents drawn
 * from `opp`. Throws EmptyConditioningError when the conditioning
 * probability is below 1e-300.
 */
double conditional_utility(Opponents k, State state, const UserProfile& self,
                           const UserProfile& opp, const SystemParams& sys,
                           double tol = 1e-9);

//! E[c_K(h)] over the full law of h.
double unconditional_utility(Opponents k, const UserProfile& self,
                             const UserProfile& opp, const SystemParams& sys,
                             double tol = 1e-9);

/*!
 * Cached evaluator shared by the solvers. Values are built from the
 * memoryless decomposition: the interference of r demanding CC opponents
 * and v WC opponents above threshold is v psi + Erlang(r + v, lambda), so
 * every C is a binomial mixture of one-dimensional Erlang expectations
 * of the conditional own-gain rate.
 *
 * Copies share the cache. Thread-safe.
 */
class UtilityEngine
{
  public:
    explicit UtilityEngine(SystemParams sys, double tol = 1e-9);

    const SystemParams& system() const { return sys_; }
    double tol() const { return tol_; }

    //! Continuous extension: a bad state with psi == 0 yields c(0) == 0.
    double value(Opponents k, Conditioning c, const UserProfile& self,
                 const UserProfile& opp) const;

    double conditional(Opponents k, State s, const UserProfile& self,
                       const UserProfile& opp) const
    {
        return value(k, conditioning_of(s), self, opp);
    }

    double unconditional(Opponents k, const UserProfile& self,
                         const UserProfile& opp) const
    {
        return value(k, Conditioning::Full, self, opp);
    }

    //! Number of cached Erlang-mixture components (diagnostics).
    std::size_t cached_components() const;

  private:
    struct Cache;

    double component(Conditioning c, const UserProfile& self,
                     const UserProfile& opp, int v, int m) const;

    SystemParams sys_;
    double tol_;
    std::shared_ptr<Cache> cache_;
};

struct UtilityEntry
{
    int user = 0;  //!< 0-based; always 0 in symmetric mode
    Opponents opponents;
    Conditioning conditioning = Conditioning::Full;
    double value = 0.0;
};

//! Snapshot of C(0), C(1), C(inf) for every descriptor of a scenario.
struct UtilityTable
{
    std::vector<UtilityEntry> entries;
    double tol = 0.0;

    double at(int user, Opponents k, Conditioning c) const;
    //! Empty when all invariants hold, otherwise one message per violation.
    std::vector<std::string> violations() const;
};

//! Two-user: each user against WW/WC/CC. Symmetric: every [k1, k2] with
//! k1 + k2 <= n - 1. Bad-state entries are omitted when psi == 0.
UtilityTable build_utility_table(const Scenario& scenario,
                                 const UtilityEngine& engine);

}  // namespace dynoffset
