#include <iostream>
#include <string>
#include <vector>

#include "chronoscope/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return chronoscope::run_cli(args, std::cout, std::cerr);
}
