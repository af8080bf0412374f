// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "smashlab/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> const args(argv + 1, argv + argc);
    return smashlab::cli::run(args, std::cout, std::cerr);
}
