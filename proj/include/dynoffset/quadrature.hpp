// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive 7/15-point Gauss-Kronrod quadrature to an absolute
// tolerance, plus the half-line substitutions used by the utility engine.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "dynoffset/errors.hpp"

namespace dynoffset
{

struct QuadratureResult
{
    double value = 0.0;
    double abs_error = 0.0;
    int evaluations = 0;
};

namespace detail
{
// Kronrod abscissae (x), Kronrod weights (wk) and the embedded Gauss weights
// on odd-index nodes.
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g7_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel
{
    double a, b, value, error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template<class F>
Panel gk15(const F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * gk15_wk[7];
    double gauss = fc * g7_w[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j)
    {
        const double dx = half * gk15_x[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double pair = f1[j] + f2[j];
        kronrod += gk15_wk[j] * pair;
        abs_sum += gk15_wk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1)
            gauss += g7_w[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = gk15_wk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += gk15_wk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double result = kronrod * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0 && err != 0)
        err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps))
        err = std::max(50 * eps * resabs, err);
    return {a, b, result, err};
}
}  // namespace detail

/*!
 * Integrate f over [a, b] until the summed error estimate is at most
 * abs_tol. Throws NumericalError carrying the achieved error estimate when
 * the panel budget runs out or panels shrink below machine resolution.
 */
template<class F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol,
                           int max_panels = 4000)
{
    QuadratureResult out;
    if (a == b)
        return out;

    std::priority_queue<detail::Panel> panels;
    auto first = detail::gk15(f, a, b);
    out.evaluations = 15;
    double total = first.value;
    double error = first.error;
    panels.push(first);
    int count = 1;
    while (error > abs_tol)
    {
        if (count >= max_panels)
        {
            throw NumericalError(
                "quadrature did not converge: error estimate "
                    + std::to_string(error) + " > " + std::to_string(abs_tol),
                error);
        }
        auto worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            if (error <= 1e3 * abs_tol)
                break;
            throw NumericalError("quadrature hit machine resolution", error);
        }
        panels.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    total = 0;
    error = 0;
    while (!panels.empty())
    {
        total += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    out.value = total;
    out.abs_error = error;
    return out;
}

/*!
 * Integrate f(h) against the Exp(lambda) law restricted to h > lower, i.e.
 * E[f(lower + X)], X ~ Exp(lambda). Uses the exact measure transform
 * h = lower - ln(1 - u) / lambda, u in [0, 1).
 */
template<class F>
QuadratureResult integrate_exponential_tail(const F& f, double lambda,
                                            double lower, double abs_tol)
{
    auto g = [&](double u) {
        const double tail = 1.0 - u;
        if (!(tail > 0))
            return 0.0;
        return f(lower - std::log(tail) / lambda);
    };
    return integrate(g, 0.0, 1.0, abs_tol);
}

/*!
 * Same expectation as integrate_exponential_tail, computed with
 * h = lower + t / (lambda (1 - t)) and the density kept in the integrand.
 */
template<class F>
QuadratureResult expect_exponential_tail(const F& f, double lambda,
                                         double lower, double abs_tol);

/*!
 * E[f(X) | X < upper] for X ~ Exp(lambda), via u in [0, 1] mapped to
 * h = -ln(1 - u (1 - e^{-lambda upper})) / lambda. Returns f(0) when the
 * interval is empty (the right-limit of the conditional mean).
 */
template<class F>
QuadratureResult integrate_exponential_head(const F& f, double lambda,
                                            double upper, double abs_tol)
{
    const double mass = -std::expm1(-lambda * upper);
    if (!(mass > 0))
        return {f(0.0), 0.0, 1};
    auto g = [&](double u) { return f(-std::log1p(-u * mass) / lambda); };
    return integrate(g, 0.0, 1.0, abs_tol);
}

/*!
 * Integrate f over [0, inf) with x = scale * t / (1 - t). Intended for
 * integrands that already carry a decaying density.
 */
template<class F>
QuadratureResult integrate_half_line(const F& f, double scale, double abs_tol)
{
    auto g = [&](double t) {
        const double rest = 1.0 - t;
        if (!(rest > 0))
            return 0.0;
        const double x = scale * t / rest;
        const double jac = scale / (rest * rest);
        const double fx = f(x);
        return fx == 0 ? 0.0 : fx * jac;
    };
    return integrate(g, 0.0, 1.0, abs_tol);
}

template<class F>
QuadratureResult expect_exponential_tail(const F& f, double lambda,
                                         double lower, double abs_tol)
{
    auto weighted = [&](double x) {
        const double w = lambda * std::exp(-lambda * x);
        return w == 0 ? 0.0 : w * f(lower + x);
    };
    return integrate_half_line(weighted, 1.0 / lambda, abs_tol);
}

}  // namespace dynoffset
