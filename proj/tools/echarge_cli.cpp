#include <iostream>
#include <string>
#include <vector>

#include "echarge/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return echarge::cli::main_entry(args, std::cout, std::cerr);
}
