// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Exit codes: 0 success, 1 invalid input or usage,
// 2 numerical failure or unwritable output, 3 infeasible result under
// --strict.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dynoffset/csv.hpp"
#include "dynoffset/model.hpp"
#include "dynoffset/utility.hpp"

namespace dynoffset
{

namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int invalid = 1;
inline constexpr int numerical = 2;
inline constexpr int infeasible = 3;
}  // namespace exit_code

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

//! Inclusive grid of `steps` points; geometric when `log_scale`.
std::vector<double> sweep_grid(double from, double to, int steps,
                               bool log_scale);

//! One row per threshold: the equilibrium with the largest base-station
//! utility at that threshold. Columns psi, k_cc, k_wc, load_3g, load_wifi,
//! bs_utility, poa, case_label.
CsvTable psi_sweep(const Scenario& scenario, const std::vector<double>& psis,
                   const UtilityEngine& engine);

//! Columns n, psi, k_cc, k_wc, bs_utility, poa, kstar, nstar.
CsvTable poa_curve(const Scenario& scenario, int n_from, int n_to,
                   const UtilityEngine& engine, bool* any_infeasible = nullptr);

}  // namespace dynoffset
