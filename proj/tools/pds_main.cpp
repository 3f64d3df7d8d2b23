// Copyright 2026 The PDS Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "pds/cli.hpp"

int main(int argc, char** argv) { return pds::cli::run(argc, argv, std::cout, std::cerr); }
