// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "ptr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ptr::cli::run(args, std::cout, std::cerr);
}
