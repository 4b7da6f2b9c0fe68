#include <iostream>

#include "dtr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dtr::runCli(args, std::cin, std::cout, std::cerr);
}
