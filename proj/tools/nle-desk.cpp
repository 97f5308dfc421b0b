// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "nle/cli/cli.hpp"

int main(int argc, char** argv) { return nle::cli::run(argc, argv, std::cout, std::cerr); }
