// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/oracle.hpp"

#include <cmath>

#include "dynoffset/errors.hpp"
#include "dynoffset/rng.hpp"

namespace dynoffset
{

namespace
{
constexpr double min_conditioning_probability = 1e-6;

void check_samples(std::int64_t samples)
{
    if (samples < 1)
        throw ValidationError({"sample count must be positive"});
}

//! Mean and standard error of f(0..samples-1), accumulated as deviations
//! from the first value so a constant sequence is reproduced exactly.
template<class F>
McEstimate average(const F& f, std::int64_t samples, std::uint64_t seed)
{
    check_samples(samples);
    const double first = f(0);
    CompensatedSum sum, squares;
    for (std::int64_t s = 1; s < samples; ++s)
    {
        const double d = f(s) - first;
        sum.add(d);
        squares.add(d * d);
    }
    McEstimate out;
    out.samples = samples;
    out.seed = seed;
    const double n = static_cast<double>(samples);
    const double mean_d = sum.value() / n;
    out.mean = first + mean_d;
    if (samples > 1)
    {
        const double var = std::max(
            0.0, (squares.value() - sum.value() * mean_d) / (n - 1));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

//! Interference from the opponents of one sample; draws start at `draw`.
double sample_interference(const CounterRng& rng, std::uint64_t s,
                           std::uint64_t draw, Opponents k,
                           const UserProfile& opp)
{
    double total = 0.0;
    for (int j = 0; j < k.cc + k.wc; ++j, draw += 2)
    {
        if (!(rng.uniform(s, draw) < opp.beta()))
            continue;
        const double g = sample_exponential(rng.uniform(s, draw + 1),
                                            opp.lambda());
        if (j < k.cc || g > opp.psi())
            total += g;
    }
    return total;
}
}  // namespace

std::vector<double> simulate_throughput(const std::vector<double>& gains,
                                        const std::vector<int>& actions,
                                        const std::vector<int>& demands,
                                        const SystemParams& sys)
{
    if (gains.size() != actions.size() || gains.size() != demands.size())
        throw ValidationError({"gain, action and demand vectors differ in length"});
    double on_3g = 0.0;
    for (std::size_t j = 0; j < gains.size(); ++j)
    {
        if (actions[j] && demands[j])
            on_3g += gains[j];
    }
    std::vector<double> out(gains.size(), 0.0);
    for (std::size_t i = 0; i < gains.size(); ++i)
    {
        if (!demands[i])
            continue;
        if (!actions[i])
        {
            out[i] = sys.v;
            continue;
        }
        const double others = on_3g - gains[i];
        out[i] = std::log1p(sys.p * gains[i]
                            / (sys.sigma2 + sys.p * std::max(others, 0.0)));
    }
    return out;
}

McEstimate estimate_c_multi(double h, Opponents k, const UserProfile& opp,
                            const SystemParams& sys, std::int64_t samples,
                            std::uint64_t seed, std::uint64_t stream)
{
    const CounterRng rng(seed, stream);
    return average(
        [&](std::int64_t s) {
            const double interference = sample_interference(
                rng, static_cast<std::uint64_t>(s), 0, k, opp);
            return std::log1p(sys.p * h / (sys.sigma2 + sys.p * interference));
        },
        samples, seed);
}

McEstimate estimate_conditional(Opponents k, Conditioning c,
                                const UserProfile& self, const UserProfile& opp,
                                const SystemParams& sys, std::int64_t samples,
                                std::uint64_t seed, std::uint64_t stream)
{
    const double mass = c == Conditioning::Good  ? self.alpha()
                        : c == Conditioning::Bad ? self.bad_probability()
                                                 : 1.0;
    if (mass < min_conditioning_probability)
    {
        throw EmptyConditioningError("conditioning set of state "
                                     + std::string(to_string(c))
                                     + " has probability "
                                     + std::to_string(mass));
    }
    const CounterRng rng(seed, stream);
    return average(
        [&](std::int64_t s) {
            const auto us = static_cast<std::uint64_t>(s);
            const double u = rng.uniform(us, 0);
            double h = 0.0;
            switch (c)
            {
                case Conditioning::Good:
                    h = sample_exponential_above(u, self.lambda(), self.psi());
                    break;
                case Conditioning::Bad:
                    h = sample_exponential_below(u, self.lambda(), self.psi());
                    break;
                case Conditioning::Full:
                    h = sample_exponential(u, self.lambda());
                    break;
            }
            const double interference = sample_interference(rng, us, 1, k, opp);
            return std::log1p(sys.p * h / (sys.sigma2 + sys.p * interference));
        },
        samples, seed);
}

McEstimate estimate_bs_utility(const PolicyStatistics& statistics,
                               const UserProfile& user, std::int64_t samples,
                               std::uint64_t seed, std::uint64_t stream)
{
    const CounterRng rng(seed, stream);
    const int active = statistics.k_cc + statistics.k_wc;
    return average(
        [&](std::int64_t s) {
            const auto us = static_cast<std::uint64_t>(s);
            int on_3g = 0;
            for (int j = 0; j < active; ++j)
            {
                if (!(rng.uniform(us, 2 * j) < user.beta()))
                    continue;
                if (j < statistics.k_cc)
                {
                    ++on_3g;
                    continue;
                }
                const double g = sample_exponential(rng.uniform(us, 2 * j + 1),
                                                    user.lambda());
                on_3g += g > user.psi();
            }
            return static_cast<double>(on_3g);
        },
        samples, seed);
}

}  // namespace dynoffset
