// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dynoffset/model.hpp"

namespace dynoffset::testing
{

inline Scenario symmetric(double lambda, double beta, double psi, double v,
                          int n, double p = 1.0, double sigma2 = 1.0)
{
    RawScenario raw;
    raw.p = p;
    raw.sigma2 = sigma2;
    raw.v = v;
    raw.n = n;
    raw.users = {{lambda, beta, psi}};
    return validate_scenario(raw);
}

inline Scenario pair(RawUser a, RawUser b, double v, double p = 1.0,
                     double sigma2 = 1.0)
{
    RawScenario raw;
    raw.p = p;
    raw.sigma2 = sigma2;
    raw.v = v;
    raw.n = 2;
    raw.users = {a, b};
    return validate_scenario(raw);
}

inline Scenario fig_defaults(int n, double psi = 1.0)
{
    return symmetric(0.6, 0.5, psi, 0.25, n);
}

//! Draws from the acceptance ranges: lambda in [0.1, 3], beta in (0, 1],
//! psi in (0, 5], v in [0.01, 2], p / sigma2 in [0.1, 10] (log-uniform).
class ScenarioSampler
{
  public:
    explicit ScenarioSampler(std::uint64_t seed) : gen_(seed) {}

    RawUser user()
    {
        return {uniform(0.1, 3.0), uniform(1e-3, 1.0), uniform(1e-3, 5.0)};
    }
    double v() { return uniform(0.01, 2.0); }
    double snr() { return std::exp(uniform(std::log(0.1), std::log(10.0))); }
    int integer(int lo, int hi)
    {
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }

    Scenario symmetric_scenario(int n)
    {
        const auto u = user();
        return symmetric(u.lambda, u.beta, u.psi, v(), n, snr(), 1.0);
    }
    Scenario pair_scenario()
    {
        const auto a = user();
        const auto b = user();
        return pair(a, b, v(), snr(), 1.0);
    }

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace dynoffset::testing
