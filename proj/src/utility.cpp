// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/utility.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "dynoffset/errors.hpp"
#include "dynoffset/quadrature.hpp"

namespace dynoffset
{

namespace
{
// Below this probability a conditioning set is treated as empty.
constexpr double min_conditioning_mass = 1e-300;

double gamma_pdf(int shape, double rate, double x)
{
    if (x <= 0)
        return 0.0;
    if (shape == 1)
        return rate * std::exp(-rate * x);
    const double log_pdf = shape * std::log(rate) + (shape - 1) * std::log(x)
                           - rate * x - std::lgamma(static_cast<double>(shape));
    return std::exp(log_pdf);
}

//! E[g(shift + G)], G ~ Erlang(m, rate), m >= 1.
template<class G>
double erlang_expectation(const G& g, int m, double rate, double shift,
                          double tol)
{
    if (m == 1)
        return expect_exponential_tail(g, rate, shift, tol).value;
    auto integrand = [&](double x) {
        const double w = gamma_pdf(m, rate, x);
        return w == 0 ? 0.0 : w * g(shift + x);
    };
    return integrate_half_line(integrand, m / rate, tol).value;
}

using Key = std::array<std::uint64_t, 8>;

struct KeyHash
{
    std::size_t operator()(const Key& key) const
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto word : key)
        {
            h ^= word + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xbf58476d1ce4e5b9ull;
        }
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

std::uint64_t bits(double x)
{
    return std::bit_cast<std::uint64_t>(x);
}
}  // namespace

Conditioning conditioning_of(State state)
{
    return state == State::Bad ? Conditioning::Bad : Conditioning::Good;
}

std::string_view to_string(Conditioning c)
{
    switch (c)
    {
        case Conditioning::Bad:
            return "0";
        case Conditioning::Good:
            return "1";
        case Conditioning::Full:
            return "inf";
    }
    return "?";
}

//---------------------------------------------------------------------------//
double c_ww(double h, const SystemParams& sys)
{
    return std::log1p(sys.p * h / sys.sigma2);
}

double c_cc_two_user(double h, const UserProfile& opp, const SystemParams& sys,
                     double tol)
{
    const double clean = c_ww(h, sys);
    if (opp.beta() == 0 || h == 0)
        return clean;
    auto rate = [&](double hj) {
        return std::log1p(sys.p * h / (sys.sigma2 + sys.p * hj));
    };
    const double interfered
        = integrate_exponential_tail(rate, opp.lambda(), 0.0, tol).value;
    return opp.beta() * interfered + (1 - opp.beta()) * clean;
}

double c_wc_two_user(double h, const UserProfile& opp, const SystemParams& sys,
                     double tol)
{
    const double clean = c_ww(h, sys);
    if (h == 0)
        return clean;
    const double alpha = opp.alpha();
    double interfered = 0.0;
    if (opp.beta() > 0 && alpha > 0)
    {
        auto rate = [&](double hj) {
            return std::log1p(sys.p * h / (sys.sigma2 + sys.p * hj));
        };
        // integral over h_j > psi_j of the density = alpha * E[. | h_j > psi_j]
        interfered = alpha
                     * integrate_exponential_tail(rate, opp.lambda(),
                                                  opp.psi(), tol)
                           .value;
    }
    return opp.beta() * interfered + (1 - opp.beta()) * alpha * clean
           + opp.bad_probability() * clean;
}

double erlang_interference_expectation(double h, int m, double shift,
                                       double lambda, const SystemParams& sys,
                                       double tol)
{
    if (m < 0 || shift < 0 || !(lambda > 0))
        throw ValidationError({"erlang expectation needs m >= 0, shift >= 0, "
                               "lambda > 0"});
    auto rate = [&](double interference) {
        return std::log1p(sys.p * h / (sys.sigma2 + sys.p * interference));
    };
    if (m == 0 || h == 0 || sys.p == 0)
        return rate(shift);
    return erlang_expectation(rate, m, lambda, shift, tol);
}

double binomial_coefficient(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    if (n <= 60)
    {
        std::uint64_t c = 1;
        for (int i = 0; i < k; ++i)
            c = c * static_cast<std::uint64_t>(n - i)
                / static_cast<std::uint64_t>(i + 1);
        return static_cast<double>(c);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0)
                    - std::lgamma(n - k + 1.0));
}

double binomial_pmf(int n, int k, double prob)
{
    if (k < 0 || k > n)
        return 0.0;
    if (prob <= 0)
        return k == 0 ? 1.0 : 0.0;
    if (prob >= 1)
        return k == n ? 1.0 : 0.0;
    if (n <= 60)
        return binomial_coefficient(n, k) * std::pow(prob, k)
               * std::pow(1 - prob, n - k);
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0)
                    - std::lgamma(n - k + 1.0) + k * std::log(prob)
                    + (n - k) * std::log1p(-prob));
}

double c_multi(double h, Opponents k, const UserProfile& opp,
               const SystemParams& sys, double tol)
{
    if (k.cc < 0 || k.wc < 0)
        throw ValidationError({"opponent counts must be non-negative"});
    const double beta = opp.beta();
    const double alpha = opp.alpha();
    const bool log_space = k.cc + k.wc > 60;

    // erlang terms depend only on (r + v, v)
    std::map<std::pair<int, int>, double> erlang;
    auto erlang_term = [&](int m, int v) {
        auto [it, fresh] = erlang.try_emplace({m, v}, 0.0);
        if (fresh)
            it->second = erlang_interference_expectation(
                h, m, v * opp.psi(), opp.lambda(), sys, tol);
        return it->second;
    };
    auto weight = [&](int r, int q, int v) {
        const int idle = k.cc + k.wc - r - q;
        if (!log_space)
        {
            return std::pow(beta, r + q) * std::pow(1 - beta, idle)
                   * binomial_coefficient(k.cc, r)
                   * binomial_coefficient(k.wc, q)
                   * binomial_coefficient(q, v) * std::pow(alpha, v)
                   * std::pow(1 - alpha, q - v);
        }
        auto log_or_zero = [](double x, int power) {
            if (power == 0)
                return 0.0;
            return x > 0 ? power * std::log(x)
                         : -std::numeric_limits<double>::infinity();
        };
        auto log_choose = [](int n, int j) {
            return std::lgamma(n + 1.0) - std::lgamma(j + 1.0)
                   - std::lgamma(n - j + 1.0);
        };
        return std::exp(log_or_zero(beta, r + q) + log_or_zero(1 - beta, idle)
                        + log_choose(k.cc, r) + log_choose(k.wc, q)
                        + log_choose(q, v) + log_or_zero(alpha, v)
                        + log_or_zero(1 - alpha, q - v));
    };

    double total = 0.0;
    for (int r = 0; r <= k.cc; ++r)
    {
        for (int q = 0; q <= k.wc; ++q)
        {
            for (int v = 0; v <= q; ++v)
            {
                const double w = weight(r, q, v);
                if (w == 0)
                    continue;
                total += w * erlang_term(r + v, v);
            }
        }
    }
    return total;
}

//---------------------------------------------------------------------------//
// UtilityEngine
//---------------------------------------------------------------------------//

struct UtilityEngine::Cache
{
    mutable std::shared_mutex mutex;
    std::unordered_map<Key, double, KeyHash> components;
    std::unordered_map<Key, double, KeyHash> values;

    std::optional<double> find(const std::unordered_map<Key, double, KeyHash>& map,
                               const Key& key) const
    {
        std::shared_lock lock(mutex);
        auto it = map.find(key);
        if (it == map.end())
            return std::nullopt;
        return it->second;
    }

    void store(std::unordered_map<Key, double, KeyHash>& map, const Key& key,
               double value)
    {
        std::unique_lock lock(mutex);
        map.emplace(key, value);
    }
};

UtilityEngine::UtilityEngine(SystemParams sys, double tol)
    : sys_(sys), tol_(tol), cache_(std::make_shared<Cache>())
{
    if (!(tol > 0))
        throw ValidationError({"quadrature tolerance must be positive"});
}

std::size_t UtilityEngine::cached_components() const
{
    std::shared_lock lock(cache_->mutex);
    return cache_->components.size();
}

double UtilityEngine::component(Conditioning c, const UserProfile& self,
                                const UserProfile& opp, int v, int m) const
{
    const double self_psi = c == Conditioning::Full ? 0.0 : self.psi();
    const double opp_psi = v == 0 ? 0.0 : opp.psi();
    const Key key{static_cast<std::uint64_t>(c),
                  bits(self.lambda()),
                  bits(self_psi),
                  bits(opp.lambda()),
                  bits(opp_psi),
                  static_cast<std::uint64_t>(v),
                  static_cast<std::uint64_t>(m),
                  0};
    if (auto hit = cache_->find(cache_->components, key))
        return *hit;

    const double half_tol = 0.5 * tol_;
    // Conditional own-gain rate at a given interference level.
    auto own_rate = [&](double interference) {
        if (sys_.p == 0)
            return 0.0;
        const double gain = sys_.p / (sys_.sigma2 + sys_.p * interference);
        auto f = [gain](double h) { return std::log1p(gain * h); };
        switch (c)
        {
            case Conditioning::Good:
                return expect_exponential_tail(f, self.lambda(), self_psi,
                                               half_tol)
                    .value;
            case Conditioning::Bad:
                return integrate_exponential_head(f, self.lambda(), self_psi,
                                                  half_tol)
                    .value;
            case Conditioning::Full:
                break;
        }
        return expect_exponential_tail(f, self.lambda(), 0.0, half_tol)
            .value;
    };

    const double shift = v * opp_psi;
    const double value
        = m == 0 ? own_rate(shift)
                 : erlang_expectation(own_rate, m, opp.lambda(), shift,
                                      half_tol);
    cache_->store(cache_->components, key, value);
    return value;
}

double UtilityEngine::value(Opponents k, Conditioning c,
                            const UserProfile& self,
                            const UserProfile& opp) const
{
    if (k.cc < 0 || k.wc < 0)
        throw ValidationError({"opponent counts must be non-negative"});
    const double self_psi = c == Conditioning::Full ? 0.0 : self.psi();
    const double opp_psi = k.wc == 0 ? 0.0 : opp.psi();
    const Key key{static_cast<std::uint64_t>(c),
                  bits(self.lambda()),
                  bits(self_psi),
                  bits(opp.lambda()),
                  bits(opp.beta()),
                  bits(opp_psi),
                  static_cast<std::uint64_t>(k.cc),
                  static_cast<std::uint64_t>(k.wc)};
    if (auto hit = cache_->find(cache_->values, key))
        return *hit;

    // Demanding CC opponents ~ Bin(k.cc, beta); WC opponents that demand and
    // sit above threshold ~ Bin(k.wc, beta alpha). Each of the latter adds
    // psi plus a fresh exponential.
    const double beta = opp.beta();
    const double above = beta * opp.alpha();
    double total = 0.0;
    for (int v = 0; v <= k.wc; ++v)
    {
        const double wv = binomial_pmf(k.wc, v, above);
        if (wv == 0)
            continue;
        for (int r = 0; r <= k.cc; ++r)
        {
            const double wr = binomial_pmf(k.cc, r, beta);
            if (wr == 0)
                continue;
            total += wv * wr * component(c, self, opp, v, r + v);
        }
    }
    total = std::max(total, 0.0);
    cache_->store(cache_->values, key, total);
    return total;
}

//---------------------------------------------------------------------------//
double conditional_utility(Opponents k, State state, const UserProfile& self,
                           const UserProfile& opp, const SystemParams& sys,
                           double tol)
{
    const double mass = state == State::Good ? self.alpha()
                                             : self.bad_probability();
    if (mass < min_conditioning_mass)
    {
        throw EmptyConditioningError(
            std::string("conditioning set of state ")
            + (state == State::Good ? "1" : "0") + " has probability "
            + std::to_string(mass));
    }
    return UtilityEngine(sys, tol).conditional(k, state, self, opp);
}

double unconditional_utility(Opponents k, const UserProfile& self,
                             const UserProfile& opp, const SystemParams& sys,
                             double tol)
{
    return UtilityEngine(sys, tol).unconditional(k, self, opp);
}

//---------------------------------------------------------------------------//
double UtilityTable::at(int user, Opponents k, Conditioning c) const
{
    for (const auto& e : entries)
    {
        if (e.user == user && e.opponents == k && e.conditioning == c)
            return e.value;
    }
    throw Error("utility table has no such entry");
}

std::vector<std::string> UtilityTable::violations() const
{
    std::vector<std::string> out;
    auto name = [](const UtilityEntry& e) {
        return "user " + std::to_string(e.user + 1) + " [" +
               std::to_string(e.opponents.cc) + "," +
               std::to_string(e.opponents.wc) + "](" +
               std::string(to_string(e.conditioning)) + ")";
    };
    for (const auto& e : entries)
    {
        if (!std::isfinite(e.value) || e.value < 0)
            out.push_back(name(e) + " is not a finite non-negative value");
        if (e.conditioning != Conditioning::Bad)
            continue;
        for (const auto& g : entries)
        {
            if (g.user == e.user && g.opponents == e.opponents
                && g.conditioning == Conditioning::Good && !(e.value < g.value))
            {
                out.push_back(name(e) + " is not below " + name(g));
            }
        }
    }
    return out;
}

UtilityTable build_utility_table(const Scenario& scenario,
                                 const UtilityEngine& engine)
{
    UtilityTable table;
    table.tol = engine.tol();
    auto add = [&](int user, Opponents k, const UserProfile& self,
                   const UserProfile& opp) {
        for (auto c : {Conditioning::Bad, Conditioning::Good,
                       Conditioning::Full})
        {
            if (c == Conditioning::Bad && self.bad_probability() <= 0)
                continue;
            table.entries.push_back(
                {user, k, c, engine.value(k, c, self, opp)});
        }
    };
    if (scenario.two_user())
    {
        for (int i = 0; i < 2; ++i)
        {
            for (Policy p : all_policies)
                add(i, opponents_of(p), scenario.user(i), scenario.user(1 - i));
        }
        return table;
    }
    const auto& u = scenario.user();
    for (int cc = 0; cc < scenario.n; ++cc)
    {
        for (int wc = 0; cc + wc < scenario.n; ++wc)
            add(0, {cc, wc}, u, u);
    }
    return table;
}

}  // namespace dynoffset
