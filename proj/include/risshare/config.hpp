// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "risshare/driver.hpp"

namespace risshare {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Scenario scenario;
    AoConfig ao;
};

/// JSON object with Scenario keys at the top level plus the AoConfig keys
/// max_rounds, rel_tol, include_noise, and the objects "gld" and "npsp".
/// Omitted keys keep their defaults. Unknown keys, wrong types and broken
/// invariants throw ConfigError. Doubles also accept "inf" and "-inf".
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace risshare
