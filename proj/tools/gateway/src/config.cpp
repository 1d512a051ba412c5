// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>

#include "tibsa/error.hpp"

namespace tibsa::gateway {

namespace fs = std::filesystem;

EnvLookup process_env() {
    return [](const char* name) -> std::optional<std::string> {
        const char* value = std::getenv(name);
        if (value == nullptr) return std::nullopt;
        return std::string(value);
    };
}

namespace {

int parse_int(const char* name, const std::string& text) {
    int value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ParseError(name, "expected an integer, got '" + text + "'");
    return value;
}

} // namespace

GatewayConfig apply_env(GatewayConfig c, const EnvLookup& env) {
    if (auto v = env("TIBSA_REGISTER_PATH")) c.register_path = *v;
    if (auto v = env("TIBSA_HOST")) c.host = *v;
    if (auto v = env("TIBSA_PORT")) c.port = parse_int("TIBSA_PORT", *v);
    if (auto v = env("TIBSA_PROBABLE_THRESHOLD")) c.probable_threshold = parse_int("TIBSA_PROBABLE_THRESHOLD", *v);
    if (auto v = env("TIBSA_DIVERGENCE_THRESHOLD")) {
        c.divergence_threshold = parse_int("TIBSA_DIVERGENCE_THRESHOLD", *v);
    }
    if (auto v = env("TIBSA_MAX_DEPTH")) c.max_depth = parse_int("TIBSA_MAX_DEPTH", *v);
    if (auto v = env("TIBSA_MODE")) c.mode = registry::parse_mode(*v);
    if (auto v = env("TIBSA_RUBRIC_PATH")) c.rubric_path = *v;
    if (auto v = env("TIBSA_MATRIX_CONFIG_PATH")) c.matrix_config_path = *v;
    return c;
}

void GatewayConfig::validate() const {
    std::vector<std::string> findings;
    try {
        settings().validate();
    } catch (const ValidationError& e) {
        findings = e.findings();
    }
    if (port < 0 || port > 65535) findings.emplace_back("port must be in [0,65535]");
    if (host.empty()) findings.emplace_back("host must not be empty");
    std::error_code ec;
    if (!rubric_path.empty() && !fs::is_regular_file(rubric_path, ec)) {
        findings.push_back("rubric file not found: " + rubric_path);
    }
    if (!matrix_config_path.empty() && !fs::is_regular_file(matrix_config_path, ec)) {
        findings.push_back("matrix config not found: " + matrix_config_path);
    }
    if (!register_path.empty()) {
        const auto parent = fs::absolute(fs::path(register_path), ec).parent_path();
        if (!fs::is_directory(parent, ec)) findings.push_back("register directory does not exist: " + parent.string());
    }
    if (!findings.empty()) throw ValidationError(std::move(findings));
}

} // namespace tibsa::gateway
