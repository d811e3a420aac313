#include <iostream>

#include "roadnet/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return roadnet::cli::run(args, std::cout, std::cerr);
}
