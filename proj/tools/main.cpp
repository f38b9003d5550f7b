#include <iostream>
#include <string>
#include <vector>

#include "spectramech/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spectramech::run_command(args, std::cout, std::cerr);
}
