#include <iostream>
#include <string>
#include <vector>

#include "cic/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cic::cli::run(args, std::cout, std::cerr);
}
