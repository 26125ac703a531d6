// SPDX-License-Identifier: Apache-2.0
#include "sphmp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sphmp::run_cli(args, std::cout, std::cerr);
}
