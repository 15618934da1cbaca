// SPDX-License-Identifier: Apache-2.0
//
// Offset selection by the base station: centralized, Stackelberg (two-user
// and symmetric n-user) and the two-user fully non-cooperative fixed point.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "dynoffset/equilibrium.hpp"
#include "dynoffset/metrics.hpp"
#include "dynoffset/model.hpp"
#include "dynoffset/utility.hpp"

namespace dynoffset
{

//! One (k, l) entry of the symmetric Stackelberg search: k active users of
//! which l use CC and k - l use WC.
struct Candidate
{
    int k = 0;
    int l = 0;
    std::optional<double> psi;
    double value = 0.0;  //!< P(k, l); zero when excluded or unsolvable
    std::string note;
};

struct KstarNstar
{
    int kstar = 0;
    int nstar = 0;
    int n_max = 0;
    bool kstar_saturated = false;  //!< kstar == n_max and still above v
    bool nstar_saturated = false;
    bool kstar_none = false;  //!< even a single user is below v
    bool nstar_none = false;
};

struct StackelbergOutcome
{
    std::vector<double> psi_choice;  //!< one entry, or (psi1, psi2)
    EquilibriumCertificate induced;
    double bs_utility = 0.0;
    PriceOfAnarchy poa;
    std::optional<KstarNstar> thresholds;
    std::vector<Candidate> candidates;
    bool infeasible = false;
    std::string regime;
};

//! Smallest x in [0, x_max] with f(x) >= target for nondecreasing f, by
//! doubling from x_start and bisection until the bracket is below x_tol and
//! the residual f(x) - target is below y_tol. Returns the upper bracket end.
template<class F>
std::optional<double> smallest_crossing(const F& f, double target,
                                        double x_max, double x_start,
                                        double x_tol, double y_tol);

StackelbergOutcome centralized(const Scenario& scenario);

StackelbergOutcome stackelberg_two_user(const Scenario& scenario,
                                        const UtilityEngine& engine);

//! k*: largest k <= n_max with C_[k-1,0](inf) >= v; n*: the same for
//! C_[0,k-1](inf) at the scenario threshold.
KstarNstar find_kstar_nstar(const Scenario& scenario, int n_max,
                            const UtilityEngine& engine);

struct PsiSolution
{
    std::optional<double> psi;
    bool excluded = false;  //!< a WW player would rather join
    double residual = 0.0;  //!< min{...} - v at psi
};

//! Smallest psi with min{C_[l,k-l-1](1), C_[l-1,k-l](0)} >= v, then the
//! exclusion test C_[l,k-l](1) > v for k < n. A term whose player class
//! is empty (l == k or l == 0) is left out of the minimum.
PsiSolution solve_psi_kl(int k, int l, const Scenario& scenario,
                         const UtilityEngine& engine);

StackelbergOutcome stackelberg_multi(
    const Scenario& scenario, const UtilityEngine& engine,
    const std::optional<KstarNstar>& thresholds = std::nullopt);

struct NoncooperativeOutcome
{
    double psi1 = 0.0;
    double psi2 = 0.0;
    double residual1 = 0.0;  //!< c_WC^1(psi1) - v
    double residual2 = 0.0;
    int iterations = 0;
    bool infeasible = false;
    EquilibriumCertificate induced;  //!< (WC, WC)
    double bs_utility = 0.0;
    PriceOfAnarchy poa;
};

//! Gauss-Seidel best responses psi_i <- root of c_WC^i(psi_i; psi_j) = v.
//! Throws NumericalError after max_iterations without convergence.
NoncooperativeOutcome noncooperative_two_user(const Scenario& scenario,
                                              int max_iterations = 200);

struct KstarBound
{
    double floor = 0.0;  //!< 2 / beta + 1
    double k_plus = 0.0;
    int kss = 0;         //!< ceil(max{floor, k_plus})
    double integral = 0.0;  //!< integral of log(1 + p h / sigma2) e^{-lambda h}
};

//! Throws ValidationError unless beta > 0 and v > 0.
KstarBound kstar_upper_bound(const Scenario& scenario);

//---------------------------------------------------------------------------//
template<class F>
std::optional<double> smallest_crossing(const F& f, double target,
                                        double x_max, double x_start,
                                        double x_tol, double y_tol)
{
    if (f(0.0) >= target)
        return 0.0;
    double lo = 0.0;
    double hi = std::min(x_start, x_max);
    double f_hi = f(hi);
    while (f_hi < target)
    {
        if (hi >= x_max)
            return std::nullopt;
        lo = hi;
        hi = std::min(2 * hi, x_max);
        f_hi = f(hi);
    }
    for (int it = 0; it < 200; ++it)
    {
        if (hi - lo <= x_tol && f_hi - target <= y_tol)
            break;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            break;
        const double f_mid = f(mid);
        if (f_mid >= target)
        {
            hi = mid;
            f_hi = f_mid;
        }
        else
        {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace dynoffset
