// SPDX-License-Identifier: Apache-2.0
//
// `key = value` scenario files with `#` comments.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "dynoffset/model.hpp"

namespace dynoffset
{

struct Config
{
    RawScenario raw;
    std::int64_t mc_samples = 100000;
};

//! Throws ValidationError listing every malformed, unknown or missing key.
//! A repeated key takes its last value.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);

}  // namespace dynoffset
