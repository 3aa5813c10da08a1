#include <iostream>
#include <string>
#include <vector>

#include "topgal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return topgal::cli::run(args, std::cout, std::cerr);
}
