#include <iostream>
#include <string>
#include <vector>

#include "gpvortex/io/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gpv::io::run_cli(args, std::cout, std::cerr);
}
