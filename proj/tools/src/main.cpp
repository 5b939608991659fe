#include <iostream>
#include <string>
#include <vector>

#include "irtid_cli/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return irtid::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
