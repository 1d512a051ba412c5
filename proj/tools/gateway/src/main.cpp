// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The TIBSA Engine Authors

#include "tibsa/gateway/cli.hpp"

int main(int argc, char** argv) { return tibsa::gateway::cli_main(argc, argv); }
