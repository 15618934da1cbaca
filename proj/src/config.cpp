// SPDX-License-Identifier: Apache-2.0
#include "dynoffset/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dynoffset/errors.hpp"

namespace dynoffset
{

namespace
{
const std::set<std::string> symmetric_keys = {"lambda", "beta", "psi"};
const std::set<std::string> two_user_keys
    = {"lambda1", "lambda2", "beta1", "beta2", "psi1", "psi2"};
const std::set<std::string> shared_keys
    = {"v",        "p",       "sigma2", "n",    "quad_tol",
       "root_tol", "psi_max", "seed",   "mc_samples"};

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template<class T>
bool parse_number(std::string_view text, T& out)
{
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}
}  // namespace

Config parse_config(std::string_view text)
{
    std::map<std::string, std::string> values;
    std::vector<std::string> problems;
    std::istringstream lines{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(lines, line))
    {
        ++number;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        view = trim(view);
        if (view.empty())
            continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
        {
            problems.push_back("line " + std::to_string(number)
                               + ": expected key = value");
            continue;
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string value(trim(view.substr(eq + 1)));
        if (!symmetric_keys.count(key) && !two_user_keys.count(key)
            && !shared_keys.count(key))
        {
            problems.push_back("line " + std::to_string(number)
                               + ": unknown key " + key);
            continue;
        }
        values[key] = value;
    }

    Config cfg;
    auto& raw = cfg.raw;
    auto real = [&](const std::string& key, double& out) {
        auto it = values.find(key);
        if (it == values.end())
            return false;
        if (!parse_number(it->second, out))
            problems.push_back(key + " is not a number: " + it->second);
        return true;
    };
    auto integer = [&](const std::string& key, auto& out) {
        auto it = values.find(key);
        if (it == values.end())
            return false;
        if (!parse_number(it->second, out))
            problems.push_back(key + " is not an integer: " + it->second);
        return true;
    };

    bool symmetric = false, two_user = false;
    for (const auto& [key, _] : values)
    {
        symmetric = symmetric || symmetric_keys.count(key);
        two_user = two_user || two_user_keys.count(key);
    }
    if (symmetric && two_user)
        problems.emplace_back("mixes symmetric keys (lambda, beta, psi) with "
                              "per-user keys (lambda1, ...)");

    auto required = [&](const std::string& key, double& out) {
        if (!real(key, out))
            problems.push_back("missing key " + key);
    };
    if (two_user)
    {
        raw.users.resize(2);
        for (int i = 0; i < 2; ++i)
        {
            const std::string suffix = std::to_string(i + 1);
            required("lambda" + suffix, raw.users[i].lambda);
            required("beta" + suffix, raw.users[i].beta);
            required("psi" + suffix, raw.users[i].psi);
        }
    }
    else
    {
        raw.users.resize(1);
        required("lambda", raw.users[0].lambda);
        required("beta", raw.users[0].beta);
        required("psi", raw.users[0].psi);
    }
    required("v", raw.v);
    real("p", raw.p);
    real("sigma2", raw.sigma2);
    if (!integer("n", raw.n))
    {
        if (!two_user)
            problems.emplace_back("missing key n");
        raw.n = 2;
    }
    real("quad_tol", raw.quad_tol);
    real("root_tol", raw.root_tol);
    double psi_max = 0.0;
    if (real("psi_max", psi_max))
        raw.psi_max = psi_max;
    integer("seed", raw.seed);
    if (integer("mc_samples", cfg.mc_samples) && cfg.mc_samples < 1)
        problems.emplace_back("mc_samples must be positive");
    if (!problems.empty())
        throw ValidationError(std::move(problems));
    return cfg;
}

Config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError({"cannot read config file " + path});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace dynoffset
