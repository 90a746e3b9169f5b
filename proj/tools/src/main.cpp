#include <iostream>
#include <string>
#include <vector>

#include "aperture_forge_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return apf::cli::run(args, std::cout, std::cerr);
}
