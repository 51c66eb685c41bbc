#include <iostream>
#include <string>
#include <vector>

#include "tpsr/cli.hpp"

int main(int argc, char** argv) {
  return tpsr::cli::dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
