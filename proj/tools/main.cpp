#include <iostream>
#include <string>
#include <vector>

#include "kincouple/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return kincouple::cli::run(args, std::cout, std::cerr);
}
