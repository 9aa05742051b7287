#include <iostream>
#include <string>
#include <vector>

#include "diagbez/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return diagbez::cli::run(args, std::cout, std::cerr);
}
