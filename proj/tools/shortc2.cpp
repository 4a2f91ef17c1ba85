#include <iostream>
#include <string>
#include <vector>

#include "shortc2/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return shortc2::run_cli(args, std::cout, std::cerr);
}
