#include <iostream>
#include <string>
#include <vector>

#include "musent/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return musent::cli::run(args, std::cout, std::cerr);
}
