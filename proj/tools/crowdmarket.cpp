#include <iostream>
#include <string>
#include <vector>

#include "crowdmarket/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return crowdmarket::cli::run(args, std::cout, std::cerr);
}
