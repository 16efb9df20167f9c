#include <iostream>
#include <string>
#include <vector>

#include "sjlab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return sjl::cli::run(args, std::cout, std::cerr);
}
