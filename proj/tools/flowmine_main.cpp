#include <iostream>

#include "flowmine/cli.hpp"

int main(int argc, char** argv) {
  return flowmine::cli::run(argc, argv, std::cout, std::cerr);
}
