// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "tibsa/assessment.hpp"

namespace tibsa::gateway {

struct GatewayConfig {
    std::string register_path; // empty: in-memory register, nothing persisted
    std::string host = "127.0.0.1";
    int port = 8080;
    int probable_threshold = 3;
    int divergence_threshold = 3;
    int max_depth = graph::kDefaultMaxDepth;
    registry::Mode mode = registry::Mode::Full;
    std::string rubric_path;         // empty: built-in rubric
    std::string matrix_config_path;  // empty: default score matrix

    /// ValidationError listing every out-of-range value or unresolvable path.
    void validate() const;
    registry::Settings settings() const { return {probable_threshold, divergence_threshold, max_depth}; }
};

using EnvLookup = std::function<std::optional<std::string>(const char*)>;
EnvLookup process_env();

/// Applies TIBSA_REGISTER_PATH, TIBSA_HOST, TIBSA_PORT,
/// TIBSA_PROBABLE_THRESHOLD, TIBSA_DIVERGENCE_THRESHOLD, TIBSA_MAX_DEPTH,
/// TIBSA_MODE, TIBSA_RUBRIC_PATH and TIBSA_MATRIX_CONFIG_PATH over `base`.
/// ParseError when a numeric variable is not an integer.
GatewayConfig apply_env(GatewayConfig base, const EnvLookup& env = process_env());

} // namespace tibsa::gateway
