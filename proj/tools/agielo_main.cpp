#include <iostream>

#include "agielo/cli.hpp"

int main(int argc, char** argv) {
  return agielo::run_cli(argc, argv, std::cout, std::cerr);
}
