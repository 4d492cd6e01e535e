#include <iostream>
#include <string>
#include <vector>

#include "radlabel/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radlabel::run_cli(args, std::cout, std::cerr);
}
