#include <iostream>
#include <string>
#include <vector>

#include "trackscore/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return trackscore::run_cli(args, std::cout, std::cerr);
}
