#include <iostream>
#include <string>
#include <vector>

#include "pwts/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pwts::run_cli(args, std::cout, std::cerr, std::cin);
}
