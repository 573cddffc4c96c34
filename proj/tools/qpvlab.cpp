#include <iostream>
#include <string>
#include <vector>

#include "qpvlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qpvlab::cli_dispatch(args, std::cout, std::cerr);
}
