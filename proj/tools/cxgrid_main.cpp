#include <iostream>
#include <string>
#include <vector>

#include "cxgrid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cxgrid::cli::run(args, std::cout, std::cerr);
}
