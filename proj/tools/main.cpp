#include <iostream>

#include "mcfob/cli/commands.hpp"

int main(int argc, char** argv) {
  return mcfob::cli::main_entry(argc, argv, std::cout, std::cerr);
}
