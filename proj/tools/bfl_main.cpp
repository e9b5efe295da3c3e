#include <iostream>
#include <string>
#include <vector>

#include "bfl_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bfl::cli::run(args, std::cout, std::cerr);
}
