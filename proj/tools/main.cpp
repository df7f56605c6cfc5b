#include <iostream>

#include "levylab/cli.hpp"

int main(int argc, char** argv) {
  return levylab::cli_main(argc, argv, std::cout, std::cerr);
}
