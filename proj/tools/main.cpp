#include <iostream>
#include <string>
#include <vector>

#include "evtrig/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return evtrig::run_cli(args, std::cout, std::cerr);
}
