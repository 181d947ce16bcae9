#include <iostream>

#include "trf/cli.hpp"

int main(int argc, char** argv) {
  return trf::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
