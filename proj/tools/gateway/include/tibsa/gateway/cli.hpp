// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tibsa/assessment.hpp"
#include "tibsa/gateway/config.hpp"

namespace tibsa::gateway {

/// 0 success, 2 I/O failure, 1 for every other engine or usage error.
int exit_code_for(const std::exception& e);

/// Runs one command line. `args` excludes the program name. Results go to
/// `out` (JSON unless --format says otherwise), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env(), const registry::Clock& clock = registry::system_clock());

int cli_main(int argc, char** argv);

} // namespace tibsa::gateway
