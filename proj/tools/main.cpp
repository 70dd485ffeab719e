#include <iostream>
#include <string>
#include <vector>

#include "ballot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ballot::run_cli(args, std::cout, std::cerr);
}
