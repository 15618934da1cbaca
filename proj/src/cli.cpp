// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "dynoffset/config.hpp"
#include "dynoffset/equilibrium.hpp"
#include "dynoffset/errors.hpp"
#include "dynoffset/hierarchy.hpp"
#include "dynoffset/metrics.hpp"
#include "dynoffset/oracle.hpp"

namespace dynoffset
{

namespace
{
struct Options
{
    std::string config;
    std::string out;
    std::vector<std::string> set;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool strict = false;

    std::string param = "psi";
    double from = 0.0;
    double to = 0.0;
    int steps = 0;
    std::string scale = "linear";

    int n_from = 2;
    int n_to = 50;

    bool conditions = false;
    bool candidates = false;
};

//! A failure to write the requested destination.
struct OutputError : Error
{
    using Error::Error;
};

std::string join(const std::vector<std::string>& parts, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

Config read_config(const Options& opt)
{
    if (opt.set.empty())
        return load_config(opt.config);
    std::ifstream in(opt.config);
    if (!in)
        throw ValidationError({"cannot read config file " + opt.config});
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    text += '\n';
    for (const auto& line : opt.set)
        text += line + '\n';
    return parse_config(text);
}

Scenario load_scenario(const Options& opt, Config* cfg_out = nullptr)
{
    Config cfg = read_config(opt);
    if (opt.seed_given)
        cfg.raw.seed = opt.seed;
    if (cfg_out)
        *cfg_out = cfg;
    return validate_scenario(cfg.raw);
}

void require_symmetric(const Scenario& s, const std::string& what)
{
    if (s.two_user())
        throw ValidationError({what + " needs a symmetric scenario"});
}

void require_two_user(const Scenario& s, const std::string& what)
{
    if (!s.two_user())
        throw ValidationError({what + " needs a two-user scenario"});
}

CsvField poa_field(const PriceOfAnarchy& poa)
{
    return poa.infinite ? CsvField{std::string("inf")} : CsvField{poa.value};
}

std::string descriptor_name(const Scenario& s, Opponents k)
{
    if (s.two_user())
    {
        for (Policy p : all_policies)
        {
            if (opponents_of(p) == k)
                return std::string(to_string(p));
        }
    }
    return "[" + std::to_string(k.cc) + ";" + std::to_string(k.wc) + "]";
}

//! Fields psi .. case_label for the best equilibrium at `s`.
std::vector<CsvField> equilibrium_fields(const Scenario& s,
                                         const UtilityEngine& engine)
{
    const auto eqs = multi_user_equilibria(s, engine);
    const EquilibriumCertificate* best = nullptr;
    double best_u = -1.0;
    for (const auto& e : eqs)
    {
        const double u = bs_utility(e, s);
        if (u > best_u)
        {
            best = &e;
            best_u = u;
        }
    }
    const auto loads = system_loads(best->statistics, s.user());
    const auto poa = price_of_anarchy(best_u, optimal_bs_utility(s));
    return {s.user().psi(),
            static_cast<long long>(best->statistics.k_cc),
            static_cast<long long>(best->statistics.k_wc),
            loads.load_3g,
            loads.load_wifi,
            best_u,
            poa_field(poa),
            join(best->case_labels, '|')};
}

std::string symmetric_descriptor(Opponents k, Conditioning c)
{
    return "C_[" + std::to_string(k.cc) + ";" + std::to_string(k.wc) + "]("
           + std::string(to_string(c)) + ")";
}

const std::vector<std::string> sweep_columns = {
    "psi", "k_cc", "k_wc", "load_3g", "load_wifi", "bs_utility", "poa",
    "case_label"};

//---------------------------------------------------------------------------//
// Subcommands. Each returns the CSV text and sets `infeasible` when a
// result carries an infeasibility flag.

std::string cmd_utilities(const Options& opt)
{
    const auto s = load_scenario(opt);
    UtilityEngine engine(s.system, s.quad_tol);
    const auto table = build_utility_table(s, engine);
    CsvTable csv({"user", "descriptor", "k_cc", "k_wc", "state", "value"});
    for (const auto& e : table.entries)
    {
        csv.add_row({static_cast<long long>(e.user + 1),
                     descriptor_name(s, e.opponents),
                     static_cast<long long>(e.opponents.cc),
                     static_cast<long long>(e.opponents.wc),
                     std::string(to_string(e.conditioning)), e.value});
    }
    return csv.str();
}

std::string cmd_equilibria(const Options& opt)
{
    const auto s = load_scenario(opt);
    UtilityEngine engine(s.system, s.quad_tol);
    const auto eqs = enumerate_equilibria(s, engine);
    if (opt.conditions)
    {
        CsvTable csv({"profile", "case_label", "condition", "lhs", "rhs",
                      "margin"});
        for (const auto& e : eqs)
        {
            for (const auto& c : e.conditions)
            {
                csv.add_row({e.profile_string(), join(e.case_labels, '|'),
                             c.description, c.lhs, c.rhs, c.margin});
            }
        }
        return csv.str();
    }
    CsvTable csv({"profile", "k_cc", "k_wc", "k_ww", "case_label",
                  "min_margin", "bs_utility", "deviation_check"});
    for (const auto& e : eqs)
    {
        const bool passed = check_no_deviation(e, s, engine).passed;
        csv.add_row({e.profile_string(),
                     static_cast<long long>(e.statistics.k_cc),
                     static_cast<long long>(e.statistics.k_wc),
                     static_cast<long long>(e.statistics.k_ww()),
                     join(e.case_labels, '|'), e.min_margin(),
                     bs_utility(e, s),
                     std::string(passed ? "pass" : "fail")});
    }
    return csv.str();
}

std::string outcome_csv(const StackelbergOutcome& o)
{
    CsvTable csv({"regime", "psi1", "psi2", "profile", "k_cc", "k_wc",
                  "bs_utility", "poa", "kstar", "nstar", "infeasible"});
    const bool two = o.psi_choice.size() == 2;
    csv.add_row(
        {o.regime, o.psi_choice.at(0),
         two ? CsvField{o.psi_choice[1]} : CsvField{std::string()},
         o.induced.profile_string(),
         static_cast<long long>(o.induced.statistics.k_cc),
         static_cast<long long>(o.induced.statistics.k_wc), o.bs_utility,
         poa_field(o.poa),
         o.thresholds ? CsvField{static_cast<long long>(o.thresholds->kstar)}
                      : CsvField{std::string()},
         o.thresholds ? CsvField{static_cast<long long>(o.thresholds->nstar)}
                      : CsvField{std::string()},
         static_cast<long long>(o.infeasible)});
    return csv.str();
}

std::string cmd_stackelberg(const Options& opt, bool& infeasible)
{
    const auto s = load_scenario(opt);
    UtilityEngine engine(s.system, s.quad_tol);
    const auto o = s.two_user() ? stackelberg_two_user(s, engine)
                                : stackelberg_multi(s, engine);
    infeasible = o.infeasible;
    if (opt.candidates)
    {
        CsvTable csv({"k", "l", "psi", "value", "note"});
        for (const auto& c : o.candidates)
        {
            csv.add_row({static_cast<long long>(c.k),
                         static_cast<long long>(c.l),
                         c.psi ? CsvField{*c.psi} : CsvField{std::string()},
                         c.value, c.note});
        }
        return csv.str();
    }
    return outcome_csv(o);
}

std::string cmd_centralized(const Options& opt)
{
    return outcome_csv(centralized(load_scenario(opt)));
}

std::string cmd_noncoop(const Options& opt, bool& infeasible)
{
    const auto s = load_scenario(opt);
    require_two_user(s, "noncoop");
    const auto o = noncooperative_two_user(s);
    infeasible = o.infeasible;
    CsvTable csv({"psi1", "psi2", "residual1", "residual2", "iterations",
                  "bs_utility", "poa", "infeasible"});
    csv.add_row({o.psi1, o.psi2, o.residual1, o.residual2,
                 static_cast<long long>(o.iterations), o.bs_utility,
                 poa_field(o.poa), static_cast<long long>(o.infeasible)});
    return csv.str();
}

std::string cmd_sweep(const Options& opt)
{
    const auto s = load_scenario(opt);
    require_symmetric(s, "sweep");
    UtilityEngine engine(s.system, s.quad_tol);
    if (opt.steps < 2)
        throw ValidationError({"--steps must be at least 2"});
    if (opt.param == "psi")
    {
        if (!(opt.from >= 0) || !(opt.from < opt.to))
            throw ValidationError({"psi sweep needs 0 <= from < to"});
        return psi_sweep(s, sweep_grid(opt.from, opt.to, opt.steps,
                                       opt.scale == "log"),
                         engine)
            .str();
    }
    std::vector<std::string> header = {opt.param};
    header.insert(header.end(), sweep_columns.begin(), sweep_columns.end());
    CsvTable csv(header);
    if (opt.param == "n")
    {
        const int from = static_cast<int>(opt.from);
        const int to = static_cast<int>(opt.to);
        if (from != opt.from || to != opt.to || from < 2 || !(from < to))
            throw ValidationError({"n sweep needs integers 2 <= from < to"});
        // Integer grid; repeated values after rounding are dropped.
        long long last = -1;
        for (double x : sweep_grid(from, to, opt.steps, opt.scale == "log"))
        {
            const long long n = std::llround(x);
            if (n == last)
                continue;
            last = n;
            auto row = equilibrium_fields(s.with_n(static_cast<int>(n)), engine);
            row.insert(row.begin(), n);
            csv.add_row(std::move(row));
        }
        return csv.str();
    }
    if (!(opt.from >= 0) || !(opt.from < opt.to))
        throw ValidationError({"v sweep needs 0 <= from < to"});
    for (double v : sweep_grid(opt.from, opt.to, opt.steps, opt.scale == "log"))
    {
        auto row = equilibrium_fields(s.with_v(v), engine);
        row.insert(row.begin(), v);
        csv.add_row(std::move(row));
    }
    return csv.str();
}

std::string cmd_poa_curve(const Options& opt, bool& infeasible)
{
    const auto s = load_scenario(opt);
    require_symmetric(s, "poa-curve");
    if (opt.n_from < 2 || opt.n_to < opt.n_from)
        throw ValidationError({"poa-curve needs 2 <= n-from <= n-to"});
    UtilityEngine engine(s.system, s.quad_tol);
    return poa_curve(s, opt.n_from, opt.n_to, engine, &infeasible).str();
}

std::string cmd_oracle(const Options& opt)
{
    Config cfg;
    const auto s = load_scenario(opt, &cfg);
    UtilityEngine engine(s.system, s.quad_tol);
    CsvTable csv({"quantity", "analytic", "mc_mean", "mc_stderr", "z",
                  "within_4sigma"});
    std::uint64_t stream = 0;
    auto add = [&](const std::string& name, double analytic,
                   const McEstimate& mc) {
        const double z = mc.std_error > 0 ? (analytic - mc.mean) / mc.std_error
                         : analytic == mc.mean ? 0.0
                                               : INFINITY;
        csv.add_row({name, analytic, mc.mean, mc.std_error, z,
                     std::string(std::abs(z) <= 4 ? "yes" : "no")});
    };
    auto usable = [](const UserProfile& u, Conditioning c) {
        const double mass = c == Conditioning::Good  ? u.alpha()
                            : c == Conditioning::Bad ? u.bad_probability()
                                                     : 1.0;
        return mass >= 1e-6;
    };
    constexpr Conditioning conds[] = {Conditioning::Bad, Conditioning::Good,
                                      Conditioning::Full};
    if (s.two_user())
    {
        for (int i = 0; i < 2; ++i)
        {
            for (Policy p : all_policies)
            {
                for (auto c : conds)
                {
                    const auto& self = s.user(i);
                    if (!usable(self, c))
                        continue;
                    const auto k = opponents_of(p);
                    const auto& other = s.user(1 - i);
                    add("C^" + std::to_string(i + 1) + "_"
                            + std::string(to_string(p)) + "("
                            + std::string(to_string(c)) + ")",
                        engine.value(k, c, self, other),
                        estimate_conditional(k, c, self, other, s.system,
                                             cfg.mc_samples, s.seed, stream++));
                }
            }
        }
        const auto eqs = two_user_equilibria(s, engine);
        add("U_BS" + eqs.front().profile_string(), bs_utility(eqs.front(), s),
            McEstimate{bs_utility(eqs.front(), s), 0.0, 1, s.seed});
        return csv.str();
    }
    const auto& u = s.user();
    for (Opponents k : {Opponents{0, 0}, Opponents{1, 0}, Opponents{0, 1},
                        Opponents{2, 3}})
    {
        if (k.cc + k.wc > s.n - 1)
            continue;
        for (auto c : conds)
        {
            if (!usable(u, c))
                continue;
            add(symmetric_descriptor(k, c), engine.value(k, c, u, u),
                estimate_conditional(k, c, u, u, s.system, cfg.mc_samples,
                                     s.seed, stream++));
        }
    }
    for (const auto& e : multi_user_equilibria(s, engine))
    {
        add("U_BS" + e.profile_string(), bs_utility(e, s),
            estimate_bs_utility(e.statistics, u, cfg.mc_samples, s.seed,
                                stream++));
    }
    return csv.str();
}

std::string cmd_bound(const Options& opt)
{
    const auto s = load_scenario(opt);
    require_symmetric(s, "bound");
    UtilityEngine engine(s.system, s.quad_tol);
    const auto b = kstar_upper_bound(s);
    const auto kn = find_kstar_nstar(s, std::max(s.n, 2), engine);
    CsvTable csv({"kss", "floor", "k_plus", "integral", "kstar",
                  "kstar_saturated"});
    csv.add_row({static_cast<long long>(b.kss), b.floor, b.k_plus, b.integral,
                 static_cast<long long>(kn.kstar),
                 static_cast<long long>(kn.kstar_saturated)});
    return csv.str();
}

void emit(const std::string& text, const Options& opt, std::ostream& out)
{
    if (opt.out.empty() || opt.out == "-")
    {
        out << text;
        return;
    }
    std::ofstream file(opt.out, std::ios::binary | std::ios::trunc);
    if (!file)
        throw OutputError("cannot open output file " + opt.out);
    file << text;
    file.close();
    if (!file)
        throw OutputError("failed writing output file " + opt.out);
}
}  // namespace

//---------------------------------------------------------------------------//
std::vector<double> sweep_grid(double from, double to, int steps,
                               bool log_scale)
{
    if (steps < 2)
        throw ValidationError({"a sweep needs at least two steps"});
    if (log_scale && !(from > 0))
        throw ValidationError({"a logarithmic sweep needs from > 0"});
    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
    {
        const double t = static_cast<double>(i) / (steps - 1);
        grid[i] = log_scale ? from * std::pow(to / from, t)
                            : from + (to - from) * t;
    }
    grid.front() = from;
    grid.back() = to;
    return grid;
}

CsvTable psi_sweep(const Scenario& scenario, const std::vector<double>& psis,
                   const UtilityEngine& engine)
{
    require_symmetric(scenario, "psi sweep");
    CsvTable csv(sweep_columns);
    for (double psi : psis)
        csv.add_row(equilibrium_fields(scenario.with_psi(psi), engine));
    return csv;
}

CsvTable poa_curve(const Scenario& scenario, int n_from, int n_to,
                   const UtilityEngine& engine, bool* any_infeasible)
{
    require_symmetric(scenario, "poa-curve");
    const auto kn = find_kstar_nstar(scenario, std::max(n_to, 2), engine);
    CsvTable csv({"n", "psi", "k_cc", "k_wc", "bs_utility", "poa", "kstar",
                  "nstar"});
    for (int n = n_from; n <= n_to; ++n)
    {
        const auto o = stackelberg_multi(scenario.with_n(n), engine, kn);
        if (any_infeasible && o.infeasible)
            *any_infeasible = true;
        csv.add_row({static_cast<long long>(n), o.psi_choice.at(0),
                     static_cast<long long>(o.induced.statistics.k_cc),
                     static_cast<long long>(o.induced.statistics.k_wc),
                     o.bs_utility, poa_field(o.poa),
                     static_cast<long long>(kn.kstar),
                     static_cast<long long>(kn.nstar)});
    }
    return csv;
}

//---------------------------------------------------------------------------//
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err)
{
    CLI::App app{"Offset (CQI threshold) selection for WiFi/3G association "
                 "games"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "scenario file (key = value)")
            ->required();
        sub->add_option("--out", opt.out, "output file (default stdout)");
        sub->add_option("--set", opt.set,
                        "extra config line, e.g. --set psi=0.5");
        sub->add_option("--seed", opt.seed, "override the config seed");
        sub->add_flag("--strict", opt.strict,
                      "exit 3 when a result is flagged infeasible");
        return sub;
    };

    auto* utilities = common(app.add_subcommand(
        "utilities", "conditional utilities C(0), C(1), C(inf)"));
    auto* equilibria = common(
        app.add_subcommand("equilibria", "pure Bayes-Nash equilibria"));
    equilibria->add_flag("--conditions", opt.conditions,
                         "list each equilibrium condition with its margin");
    auto* stackelberg = common(app.add_subcommand(
        "stackelberg", "base station as leader choosing the threshold"));
    stackelberg->add_flag("--candidates", opt.candidates,
                          "list the (k, l) candidate table");
    auto* noncoop = common(app.add_subcommand(
        "noncoop", "two-user fully non-cooperative thresholds"));
    auto* central = common(app.add_subcommand(
        "centralized", "base station dictates thresholds and policies"));
    auto* sweep = common(app.add_subcommand(
        "sweep", "equilibrium loads over a parameter grid"));
    sweep->add_option("--param", opt.param, "psi, n or v")
        ->check(CLI::IsMember({"psi", "n", "v"}));
    sweep->add_option("--from", opt.from)->required();
    sweep->add_option("--to", opt.to)->required();
    sweep->add_option("--steps", opt.steps)->required();
    sweep->add_option("--scale", opt.scale, "linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
    auto* curve = common(app.add_subcommand(
        "poa-curve", "Stackelberg price of anarchy against n"));
    curve->add_option("--n-from", opt.n_from);
    curve->add_option("--n-to", opt.n_to);
    auto* oracle = common(app.add_subcommand(
        "oracle", "Monte-Carlo check of the analytic values"));
    auto* bound = common(
        app.add_subcommand("bound", "closed-form upper bound on k*"));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        out << app.help();
        return exit_code::ok;
    }
    catch (const CLI::CallForAllHelp& e)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() == 0)
        {
            out << app.help();
            return exit_code::ok;
        }
        err << "error: " << e.what() << "\n" << app.help();
        return exit_code::invalid;
    }

    for (auto* sub : app.get_subcommands())
        opt.seed_given = opt.seed_given || sub->count("--seed") > 0;

    try
    {
        bool infeasible = false;
        std::string text;
        if (utilities->parsed())
            text = cmd_utilities(opt);
        else if (equilibria->parsed())
            text = cmd_equilibria(opt);
        else if (stackelberg->parsed())
            text = cmd_stackelberg(opt, infeasible);
        else if (noncoop->parsed())
            text = cmd_noncoop(opt, infeasible);
        else if (central->parsed())
            text = cmd_centralized(opt);
        else if (sweep->parsed())
            text = cmd_sweep(opt);
        else if (curve->parsed())
            text = cmd_poa_curve(opt, infeasible);
        else if (oracle->parsed())
            text = cmd_oracle(opt);
        else if (bound->parsed())
            text = cmd_bound(opt);
        emit(text, opt, out);
        if (infeasible)
        {
            err << "warning: result flagged infeasible\n";
            if (opt.strict)
                return exit_code::infeasible;
        }
        return exit_code::ok;
    }
    catch (const ValidationError& e)
    {
        err << "invalid input: " << e.what() << "\n";
        return exit_code::invalid;
    }
    catch (const OutputError& e)
    {
        err << "output error: " << e.what() << "\n";
        return exit_code::numerical;
    }
    catch (const Error& e)
    {
        err << "numerical failure: " << e.what() << "\n";
        return exit_code::numerical;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err)
{
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dynoffset
