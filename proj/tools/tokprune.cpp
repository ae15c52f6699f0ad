// Copyright (C) 2025 The tokprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "tokprune/cli.hpp"

int main(int argc, char** argv) {
    return tokprune::cli::run(argc, argv, std::cout, std::cerr);
}
