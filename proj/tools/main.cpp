#include <iostream>
#include <string>
#include <vector>

#include "crmoduli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return crmoduli::run_cli(args, std::cout, std::cerr);
}
