#include <iostream>

#include "dre/cli.hpp"

int main(int argc, char** argv) {
  return dre::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
