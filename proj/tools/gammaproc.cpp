#include <iostream>
#include <string>
#include <vector>

#include "gammaproc/cli.hpp"

int main(int argc, char** argv) {
  return gammaproc::command_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
