#include <iostream>

#include "depthcap/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return depthcap::cli::run_cli(args, std::cout, std::cerr);
}
