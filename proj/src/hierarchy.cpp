// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/hierarchy.hpp"

#include <cmath>
#include <limits>

#include "dynoffset/errors.hpp"
#include "dynoffset/quadrature.hpp"

namespace dynoffset
{

namespace
{
EquilibriumCertificate certify(const std::array<Policy, 2>& policies,
                               const Scenario& at, const UtilityEngine& engine,
                               const std::string& label, bool required)
{
    auto report = check_no_deviation(policies, at, engine);
    if (required && !report.passed)
    {
        throw ConsistencyError("induced profile fails the deviation check");
    }
    EquilibriumCertificate cert;
    cert.two_user = true;
    cert.policies = policies;
    int cc = 0, wc = 0;
    for (Policy p : policies)
    {
        cc += p == Policy::CC;
        wc += p == Policy::WC;
    }
    cert.statistics = make_policy_statistics(cc, wc, 2);
    cert.conditions = std::move(report.conditions);
    cert.case_labels.push_back(label);
    return cert;
}

EquilibriumCertificate certify(const PolicyStatistics& stats,
                               const Scenario& at, const UtilityEngine& engine,
                               const std::string& label, bool required)
{
    auto report = check_no_deviation(stats, at, engine);
    if (required && !report.passed)
    {
        throw ConsistencyError("induced profile [" + std::to_string(stats.k_cc)
                               + "," + std::to_string(stats.k_wc)
                               + "] fails the deviation check");
    }
    EquilibriumCertificate cert;
    cert.statistics = stats;
    cert.conditions = std::move(report.conditions);
    cert.case_labels.push_back(label);
    return cert;
}

Scenario with_thresholds(const Scenario& s, double psi1, double psi2)
{
    Scenario out = s;
    out.users[0] = s.users[0].with_psi(psi1);
    out.users[1] = s.users[1].with_psi(psi2);
    return out;
}

//! Threshold grid uniform in the good-state probability.
double grid_psi(const UserProfile& u, double psi_max, double t)
{
    const double mass = -std::expm1(-u.lambda() * psi_max);
    return std::min(psi_max, -std::log1p(-t * mass) / u.lambda());
}

struct TwoUserCandidate
{
    double psi1 = 0.0;
    double psi2 = 0.0;
    double objective = -1.0;
    std::array<Policy, 2> policies{Policy::WW, Policy::WW};
    std::string label;
};
}  // namespace

//---------------------------------------------------------------------------//
StackelbergOutcome centralized(const Scenario& scenario)
{
    StackelbergOutcome out;
    out.regime = "centralized";
    for (const auto& u : scenario.users)
        out.psi_choice.push_back(u.psi());
    EquilibriumCertificate cert;
    cert.two_user = scenario.two_user();
    cert.case_labels.push_back("centralized");
    if (cert.two_user)
    {
        cert.policies = {Policy::CC, Policy::CC};
        cert.statistics = make_policy_statistics(2, 0, 2);
    }
    else
    {
        cert.statistics = make_policy_statistics(scenario.n, 0, scenario.n);
    }
    out.induced = cert;
    out.bs_utility = optimal_bs_utility(scenario);
    out.poa = price_of_anarchy(out.bs_utility, optimal_bs_utility(scenario));
    return out;
}

//---------------------------------------------------------------------------//
StackelbergOutcome stackelberg_two_user(const Scenario& scenario,
                                        const UtilityEngine& engine)
{
    if (!scenario.two_user())
        throw ValidationError({"two-user Stackelberg needs two users"});
    const double v = scenario.system.v;
    const double tol = scenario.root_tol;
    const double psi_max = scenario.psi_max;
    const double optimum = optimal_bs_utility(scenario);

    // C^i_opp(c) with user i at threshold psi_i and the opponent at psi_j.
    auto value = [&](int i, Policy opp, Conditioning c, double psi_i,
                     double psi_j) {
        return engine.value(opponents_of(opp), c,
                            scenario.user(i).with_psi(psi_i),
                            scenario.user(1 - i).with_psi(psi_j));
    };
    auto start = [&](int i) { return 1.0 / scenario.user(i).lambda(); };

    StackelbergOutcome out;
    const bool all_cc = value(0, Policy::CC, Conditioning::Full, 0, 0) > v
                        && value(1, Policy::CC, Conditioning::Full, 0, 0) > v;
    if (all_cc)
    {
        std::array<std::optional<double>, 2> psi;
        for (int i = 0; i < 2; ++i)
        {
            psi[i] = smallest_crossing(
                [&](double x) {
                    return value(i, Policy::CC, Conditioning::Bad, x, 0);
                },
                v + tol, psi_max, start(i), tol, tol);
        }
        if (psi[0] && psi[1])
        {
            const auto at = with_thresholds(scenario, *psi[0], *psi[1]);
            out.regime = "all-cc";
            out.psi_choice = {*psi[0], *psi[1]};
            out.induced = certify({Policy::CC, Policy::CC}, at, engine, "a",
                                  true);
            out.bs_utility = optimum;
            out.poa = price_of_anarchy(out.bs_utility, optimum);
            return out;
        }
    }

    TwoUserCandidate best;

    // Both users on WC: for each psi1, the smallest psi2 meeting both
    // good-state conditions, then the two bad-state conditions.
    auto wc_wc_at = [&](double psi1, double x_tol) {
        TwoUserCandidate c;
        auto good = [&](double psi2) {
            return std::min(value(0, Policy::WC, Conditioning::Good, psi1, psi2),
                            value(1, Policy::WC, Conditioning::Good, psi2, psi1));
        };
        auto psi2 = smallest_crossing(good, v, psi_max, start(1), x_tol, tol);
        if (!psi2)
            return c;
        if (value(0, Policy::WC, Conditioning::Bad, psi1, *psi2) > v + tol
            || value(1, Policy::WC, Conditioning::Bad, *psi2, psi1) > v + tol)
            return c;
        c.psi1 = psi1;
        c.psi2 = *psi2;
        c.policies = {Policy::WC, Policy::WC};
        c.label = "e";
        c.objective = bs_utility(c.policies, scenario.user(0).with_psi(psi1),
                                 scenario.user(1).with_psi(*psi2));
        return c;
    };
    {
        constexpr int grid = 64;
        constexpr double coarse = 1e-4;
        std::vector<double> psi1s;
        for (int g = 0; g <= grid; ++g)
            psi1s.push_back(grid_psi(scenario.user(0), psi_max,
                                     static_cast<double>(g) / grid));
        TwoUserCandidate grid_best;
        int best_index = -1;
        for (int g = 0; g <= grid; ++g)
        {
            auto c = wc_wc_at(psi1s[g], coarse);
            if (c.objective > grid_best.objective)
            {
                grid_best = c;
                best_index = g;
            }
        }
        if (best_index >= 0)
        {
            double lo = psi1s[std::max(best_index - 1, 0)];
            double hi = psi1s[std::min(best_index + 1, grid)];
            double centre = psi1s[best_index];
            for (int round = 0; round < 3; ++round)
            {
                constexpr int fine = 8;
                for (int g = 0; g <= fine; ++g)
                {
                    const double psi1 = lo + (hi - lo) * g / fine;
                    auto c = wc_wc_at(psi1, coarse);
                    if (c.objective > grid_best.objective)
                    {
                        grid_best = c;
                        centre = psi1;
                    }
                }
                const double half = (hi - lo) / fine;
                lo = std::max(0.0, centre - half);
                hi = std::min(psi_max, centre + half);
            }
            auto c = wc_wc_at(grid_best.psi1, tol);
            if (c.objective > best.objective)
                best = c;
        }
    }

    // User i on CC, user j on WC. The objective only depends on psi_j, so
    // take the smallest psi_j for which some psi_i makes i's bad state
    // favour 3G and j's good state favours 3G.
    for (int i = 0; i < 2; ++i)
    {
        const int j = 1 - i;
        auto need = [&](double psi_j) {
            return std::min(
                value(j, Policy::CC, Conditioning::Good, psi_j, 0),
                value(i, Policy::WC, Conditioning::Bad, psi_max, psi_j));
        };
        auto psi_j = smallest_crossing(need, v, psi_max, start(j), tol, tol);
        if (!psi_j)
            continue;
        if (value(j, Policy::CC, Conditioning::Bad, *psi_j, 0) > v + tol)
            continue;
        auto psi_i = smallest_crossing(
            [&](double x) {
                return value(i, Policy::WC, Conditioning::Bad, x, *psi_j);
            },
            v, psi_max, start(i), tol, tol);
        if (!psi_i)
            continue;
        TwoUserCandidate c;
        c.psi1 = i == 0 ? *psi_i : *psi_j;
        c.psi2 = i == 0 ? *psi_j : *psi_i;
        c.policies = i == 0 ? std::array{Policy::CC, Policy::WC}
                            : std::array{Policy::WC, Policy::CC};
        c.label = i == 0 ? "b" : "d";
        c.objective = bs_utility(c.policies, scenario.user(0).with_psi(c.psi1),
                                 scenario.user(1).with_psi(c.psi2));
        if (c.objective > best.objective)
            best = c;
    }

    if (best.objective < 0)
    {
        out.regime = "infeasible";
        out.infeasible = true;
        out.psi_choice = {scenario.user(0).psi(), scenario.user(1).psi()};
        out.induced = certify({Policy::WW, Policy::WW}, scenario, engine, "none",
                              false);
        out.bs_utility = 0.0;
        out.poa = price_of_anarchy(0.0, optimum);
        return out;
    }
    const auto at = with_thresholds(scenario, best.psi1, best.psi2);
    out.regime = best.label == "e" ? "wc-wc" : "cc-wc";
    out.psi_choice = {best.psi1, best.psi2};
    out.induced = certify(best.policies, at, engine, best.label, true);
    out.bs_utility = best.objective;
    out.poa = price_of_anarchy(out.bs_utility, optimum);
    return out;
}

//---------------------------------------------------------------------------//
KstarNstar find_kstar_nstar(const Scenario& scenario, int n_max,
                            const UtilityEngine& engine)
{
    if (scenario.two_user())
        throw ValidationError({"k* and n* need a symmetric scenario"});
    if (n_max < 2)
        throw ValidationError({"n_max must be at least 2"});
    const double v = scenario.system.v;
    const double tol = scenario.root_tol;
    const auto& u = scenario.user();

    // Largest k in [1, n_max] with f(k) >= v for decreasing f; 0 if none.
    struct Search
    {
        int k;
        bool saturated;
        bool none;
    };
    auto largest = [&](auto f) -> Search {
        auto holds = [&](int k) { return f(k) - v >= -tol; };
        if (!holds(1))
            return {0, false, true};
        int lo = 1;
        int hi = 2;
        while (hi <= n_max && holds(hi))
        {
            lo = hi;
            hi *= 2;
        }
        if (hi > n_max)
        {
            if (holds(n_max))
                return {n_max, true, false};
            hi = n_max;
        }
        while (hi - lo > 1)
        {
            const int mid = lo + (hi - lo) / 2;
            (holds(mid) ? lo : hi) = mid;
        }
        return {lo, false, false};
    };
    const auto ks = largest(
        [&](int k) { return engine.unconditional({k - 1, 0}, u, u); });
    const auto ns = largest(
        [&](int k) { return engine.unconditional({0, k - 1}, u, u); });
    KstarNstar out;
    out.n_max = n_max;
    out.kstar = ks.k;
    out.kstar_saturated = ks.saturated;
    out.kstar_none = ks.none;
    out.nstar = ns.k;
    out.nstar_saturated = ns.saturated;
    out.nstar_none = ns.none;
    return out;
}

PsiSolution solve_psi_kl(int k, int l, const Scenario& scenario,
                         const UtilityEngine& engine)
{
    if (scenario.two_user())
        throw ValidationError({"psi(k, l) needs a symmetric scenario"});
    if (k < 1 || k > scenario.n || l < 0 || l > k)
        throw ValidationError({"psi(k, l) needs 1 <= k <= n and 0 <= l <= k"});
    const double v = scenario.system.v;
    const double tol = scenario.root_tol;
    const auto& base = scenario.user();

    auto expression = [&](double psi) {
        const auto u = base.with_psi(psi);
        double m = std::numeric_limits<double>::infinity();
        if (l < k)
            m = std::min(m, engine.value({l, k - l - 1}, Conditioning::Good, u, u));
        if (l > 0)
            m = std::min(m, engine.value({l - 1, k - l}, Conditioning::Bad, u, u));
        return m;
    };
    PsiSolution out;
    out.psi = smallest_crossing(expression, v, scenario.psi_max,
                                1.0 / base.lambda(), tol, tol);
    if (!out.psi)
        return out;
    out.residual = expression(*out.psi) - v;
    if (k < scenario.n)
    {
        const auto u = base.with_psi(*out.psi);
        out.excluded
            = engine.value({l, k - l}, Conditioning::Good, u, u) - v > tol;
    }
    return out;
}

StackelbergOutcome stackelberg_multi(const Scenario& scenario,
                                     const UtilityEngine& engine,
                                     const std::optional<KstarNstar>& thresholds)
{
    if (scenario.two_user())
        throw ValidationError({"symmetric Stackelberg needs a symmetric scenario"});
    const int n = scenario.n;
    const double v = scenario.system.v;
    const double tol = scenario.root_tol;
    const auto& base = scenario.user();
    const double optimum = optimal_bs_utility(scenario);

    const KstarNstar kn = thresholds && thresholds->n_max >= n
                              ? *thresholds
                              : find_kstar_nstar(scenario, n, engine);
    StackelbergOutcome out;
    out.thresholds = kn;

    if (n <= kn.kstar)
    {
        auto psi = smallest_crossing(
            [&](double x) {
                const auto u = base.with_psi(x);
                return engine.value({n - 1, 0}, Conditioning::Bad, u, u);
            },
            v + tol, scenario.psi_max, 1.0 / base.lambda(), tol, tol);
        if (psi)
        {
            out.regime = "all-cc";
            out.psi_choice = {*psi};
            out.induced = certify(make_policy_statistics(n, 0, n),
                                  scenario.with_psi(*psi), engine, "e", true);
            out.bs_utility = optimum;
            out.poa = price_of_anarchy(out.bs_utility, optimum);
            return out;
        }
    }

    const Candidate* best = nullptr;
    const int k_hi = std::min(n, kn.nstar);
    for (int k = std::max(kn.kstar, 1); k <= k_hi; ++k)
    {
        for (int l = 0; l <= k; ++l)
        {
            Candidate c;
            c.k = k;
            c.l = l;
            const auto sol = solve_psi_kl(k, l, scenario, engine);
            c.psi = sol.psi;
            if (!sol.psi)
                c.note = "no root";
            else if (sol.excluded)
                c.note = "excluded";
            else
            {
                c.note = "ok";
                c.value = base.beta()
                          * (l + std::exp(-base.lambda() * *sol.psi) * (k - l));
            }
            out.candidates.push_back(c);
        }
    }
    for (const auto& c : out.candidates)
    {
        if (c.note == "ok" && (!best || c.value > best->value))
            best = &c;
    }

    if (!best || !(best->value > 0))
    {
        out.regime = "infeasible";
        out.infeasible = true;
        out.psi_choice = {base.psi()};
        out.induced = certify(make_policy_statistics(0, 0, n), scenario, engine,
                              "none", false);
        out.bs_utility = 0.0;
        out.poa = price_of_anarchy(0.0, optimum);
        return out;
    }
    const double psi = *best->psi;
    const auto stats = make_policy_statistics(best->l, best->k - best->l, n);
    out.regime = "candidate";
    out.psi_choice = {psi};
    out.induced = certify(stats, scenario.with_psi(psi), engine,
                          "k=" + std::to_string(best->k)
                              + ";l=" + std::to_string(best->l),
                          true);
    out.bs_utility = bs_utility(stats, base.with_psi(psi));
    out.poa = price_of_anarchy(out.bs_utility, optimum);
    return out;
}

//---------------------------------------------------------------------------//
NoncooperativeOutcome noncooperative_two_user(const Scenario& scenario,
                                              int max_iterations)
{
    if (!scenario.two_user())
        throw ValidationError({"the non-cooperative solve needs two users"});
    const double v = scenario.system.v;
    const double tol = scenario.root_tol;
    auto rate = [&](int i, double h, double psi_j) {
        return c_wc_two_user(h, scenario.user(1 - i).with_psi(psi_j),
                             scenario.system, scenario.quad_tol);
    };
    auto best_response = [&](int i, double psi_j) {
        return smallest_crossing([&](double h) { return rate(i, h, psi_j); },
                                 v, scenario.psi_max,
                                 1.0 / scenario.user(i).lambda(), 0.1 * tol,
                                 tol);
    };

    NoncooperativeOutcome out;
    std::array<double, 2> psi{0.0, 0.0};
    bool converged = false;
    for (int it = 1; it <= max_iterations && !converged; ++it)
    {
        out.iterations = it;
        double change = 0.0;
        for (int i = 0; i < 2; ++i)
        {
            auto next = best_response(i, psi[1 - i]);
            if (!next)
            {
                out.infeasible = true;
                out.psi1 = psi[0];
                out.psi2 = psi[1];
                out.poa = price_of_anarchy(0.0, optimal_bs_utility(scenario));
                return out;
            }
            change = std::max(change, std::abs(*next - psi[i]));
            psi[i] = *next;
        }
        converged = it > 1 && change < tol;
    }
    if (!converged)
    {
        throw NumericalError(
            "best-response iteration did not converge; last iterate ("
                + std::to_string(psi[0]) + ", " + std::to_string(psi[1]) + ")",
            0.0);
    }
    out.psi1 = psi[0];
    out.psi2 = psi[1];
    out.residual1 = rate(0, psi[0], psi[1]) - v;
    out.residual2 = rate(1, psi[1], psi[0]) - v;
    const auto at = with_thresholds(scenario, psi[0], psi[1]);
    out.induced = certify({Policy::WC, Policy::WC}, at,
                          UtilityEngine(scenario.system, scenario.quad_tol),
                          "noncooperative", false);
    out.bs_utility = bs_utility(out.induced.policies, at.user(0), at.user(1));
    out.poa = price_of_anarchy(out.bs_utility, optimal_bs_utility(scenario));
    return out;
}

//---------------------------------------------------------------------------//
KstarBound kstar_upper_bound(const Scenario& scenario)
{
    if (scenario.two_user())
        throw ValidationError({"k** needs a symmetric scenario"});
    const auto& u = scenario.user();
    const double v = scenario.system.v;
    std::vector<std::string> problems;
    if (!(u.beta() > 0))
        problems.emplace_back("k** needs beta > 0");
    if (!(v > 0))
        problems.emplace_back("k** needs v > 0");
    if (!problems.empty())
        throw ValidationError(std::move(problems));

    const auto& sys = scenario.system;
    const double lambda = u.lambda();
    const double beta = u.beta();
    KstarBound out;
    out.integral = integrate_half_line(
                       [&](double h) {
                           return std::log1p(sys.p * h / sys.sigma2)
                                  * std::exp(-lambda * h);
                       },
                       1.0 / lambda, scenario.quad_tol)
                       .value;
    out.floor = 2.0 / beta + 1.0;

    auto lhs = [&](double k) {
        const double a = (k - 1) * beta;
        return 0.5 * lambda * std::exp(-(k - 1) * beta * beta / 2) * out.integral
               + std::log(a / (a - 2));
    };
    // lhs falls from +inf at the floor to 0.
    double lo = out.floor;
    double hi = out.floor + 1.0;
    while (lhs(hi) >= v)
    {
        lo = hi;
        hi = out.floor + 2 * (hi - out.floor);
    }
    for (int it = 0; it < 200 && hi - lo > scenario.root_tol; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            break;
        (lhs(mid) >= v ? lo : hi) = mid;
    }
    out.k_plus = hi;
    // k_plus is only known to root_tol; do not round a floor-hugging root up.
    out.kss = static_cast<int>(
        std::ceil(std::max(out.floor, out.k_plus - scenario.root_tol)));
    return out;
}

}  // namespace dynoffset
