#include <iostream>
#include <string>
#include <vector>

#include "ecsqkd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ecsqkd::cli::run(args, std::cout, std::cerr);
}
