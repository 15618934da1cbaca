// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dynoffset
{

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! One or more invariants violated while building a domain value.
class ValidationError : public Error
{
  public:
    explicit ValidationError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

//! Quadrature or root search failed to reach its tolerance.
class NumericalError : public Error
{
  public:
    NumericalError(const std::string& what, double residual)
        : Error(what), residual_(residual)
    {
    }

    double residual() const { return residual_; }

  private:
    double residual_;
};

//! Conditioning set of probability (numerically) zero.
class EmptyConditioningError : public Error
{
  public:
    using Error::Error;
};

//! A result contradicts a proven structural property (e.g. no equilibrium).
class ConsistencyError : public Error
{
  public:
    using Error::Error;
};

}  // namespace dynoffset
