#include <iostream>
#include <string>
#include <vector>

#include "qpn_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qpn::cli::run(args, std::cout, std::cerr);
}
