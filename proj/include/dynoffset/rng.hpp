// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random numbers: every variate is a pure function of
// (seed, stream, sample, draw), so any partition of the work reproduces
// the same numbers.
#pragma once

#include <cmath>
#include <cstdint>

namespace dynoffset
{

//! splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class CounterRng
{
  public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ull)))
    {
    }

    constexpr std::uint64_t bits(std::uint64_t sample, std::uint64_t draw) const
    {
        return mix64(mix64(key_ + sample) ^ (draw * 0xd1b54a32d192ed03ull));
    }

    //! Uniform on the open interval (0, 1).
    constexpr double uniform(std::uint64_t sample, std::uint64_t draw) const
    {
        return (static_cast<double>(bits(sample, draw) >> 11) + 0.5)
               * 0x1.0p-53;
    }

  private:
    std::uint64_t key_;
};

//! Exp(lambda) by inverse CDF.
inline double sample_exponential(double u, double lambda)
{
    return -std::log(u) / lambda;
}

//! Exp(lambda) conditioned on h > lower.
inline double sample_exponential_above(double u, double lambda, double lower)
{
    return lower - std::log(u) / lambda;
}

//! Exp(lambda) conditioned on h < upper.
inline double sample_exponential_below(double u, double lambda, double upper)
{
    const double mass = -std::expm1(-lambda * upper);
    return -std::log1p(-u * mass) / lambda;
}

//! Neumaier compensated sum.
class CompensatedSum
{
  public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + carry_; }

  private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace dynoffset
