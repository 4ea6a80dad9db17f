#include <iostream>
#include <string>
#include <vector>

#include "gspn_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gspn::cli::run(args, std::cout, std::cerr);
}
