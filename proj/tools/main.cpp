#include <iostream>

#include "permoments/cli.hpp"

int main(int argc, char** argv) {
  return permoments::cli::main(argc, argv, std::cout, std::cerr);
}
