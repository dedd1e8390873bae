#include <iostream>

#include "gdsl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gdsl::run_cli(args, std::cout, std::cerr);
}
