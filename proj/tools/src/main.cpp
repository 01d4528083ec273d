#include <iostream>

#include "neurocnn_tools/cli.hpp"

int main(int argc, char** argv) {
  return neurocnn::tools::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
