#include <iostream>

#include "conlearn_cli/commands.hpp"

int main(int argc, char** argv) {
  return conlearn::cli::run_cli(argc, argv, std::cout, std::cerr);
}
