// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared by every solver: physical constants, per-user
// statistics, the policy alphabet and symmetric-game policy counts.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynoffset
{

//! Transmit power, noise variance and the constant WiFi rate.
//! Rates are in nats (natural log) throughout.
struct SystemParams
{
    double p = 1.0;
    double sigma2 = 1.0;
    double v = 0.0;
};

SystemParams make_system_params(double p, double sigma2, double v);

//! Statistical description of one user: channel gain ~ Exp(lambda), demand
//! with probability beta, CQI threshold psi. The good-channel probability
//! alpha is always recomputed from lambda and psi.
class UserProfile
{
  public:
    double lambda() const { return lambda_; }
    double beta() const { return beta_; }
    double psi() const { return psi_; }

    //! P(h > psi) = exp(-lambda psi)
    double alpha() const;
    //! P(h < psi) = 1 - alpha, computed without cancellation
    double bad_probability() const;

    //! Same user with a different threshold.
    UserProfile with_psi(double psi) const;
    UserProfile with_beta(double beta) const;

  private:
    UserProfile(double lambda, double beta, double psi)
        : lambda_(lambda), beta_(beta), psi_(psi)
    {
    }

    friend UserProfile make_user_profile(double, double, double);

    double lambda_;
    double beta_;
    double psi_;
};

UserProfile make_user_profile(double lambda, double beta, double psi);

enum class Action
{
    WiFi,
    Cellular
};

enum class State
{
    Bad = 0,   //!< h < psi
    Good = 1,  //!< h > psi
};

//! Action pair (bad-state action, good-state action). The irrational pair
//! (C, W) has no enumerator.
enum class Policy
{
    WW,
    WC,
    CC
};

inline constexpr Policy all_policies[] = {Policy::WW, Policy::WC, Policy::CC};

Policy make_policy(Action bad_state, Action good_state);
Action action(Policy policy, State state);
std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view text);

//! Counts of interfering opponents by policy, K_{-i} = [k_cc, k_wc].
//! WW opponents never transmit on 3G and need no count.
struct Opponents
{
    int cc = 0;
    int wc = 0;

    friend bool operator==(const Opponents&, const Opponents&) = default;
};

Opponents opponents_of(Policy policy);

//! Symmetric-game policy statistics K = [k_cc, k_wc] over n players.
struct PolicyStatistics
{
    int k_cc = 0;
    int k_wc = 0;
    int n = 0;

    int k_ww() const { return n - k_cc - k_wc; }
    //! Opponent counts seen by one player using `own`.
    Opponents without(Policy own) const;

    friend bool operator==(const PolicyStatistics&, const PolicyStatistics&) = default;
};

PolicyStatistics make_policy_statistics(int k_cc, int k_wc, int n);

//! A validated problem instance. Symmetric mode holds one profile shared by
//! all n players; two-user mode holds one profile per user and n == 2.
struct Scenario
{
    SystemParams system;
    int n = 2;
    std::vector<UserProfile> users;
    double quad_tol = 1e-9;
    double root_tol = 1e-7;
    double psi_max = 0.0;
    std::uint64_t seed = 0;

    bool two_user() const { return users.size() == 2; }
    const UserProfile& user(std::size_t i = 0) const
    {
        return users.size() == 1 ? users.front() : users.at(i);
    }
    //! Copy with every threshold replaced.
    Scenario with_psi(double psi) const;
    Scenario with_v(double v) const;
    Scenario with_n(int n) const;
};

struct RawUser
{
    double lambda = 0.0;
    double beta = 0.0;
    double psi = 0.0;
};

//! Unvalidated scenario as read from a config file.
struct RawScenario
{
    double p = 1.0;
    double sigma2 = 1.0;
    double v = 0.0;
    int n = 2;
    std::vector<RawUser> users;
    double quad_tol = 1e-9;
    double root_tol = 1e-7;
    std::optional<double> psi_max;
    std::uint64_t seed = 0;
};

//! Check every invariant, reporting all violations at once. psi_max
//! defaults to 50 / min(lambda).
Scenario validate_scenario(const RawScenario& raw);

}  // namespace dynoffset
