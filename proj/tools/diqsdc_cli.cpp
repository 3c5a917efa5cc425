#include <iostream>
#include <string>
#include <vector>

#include "diqsdc/simcli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return diqsdc::simcli::main_entry(args, std::cout, std::cerr);
}
