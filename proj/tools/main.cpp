#include <iostream>
#include <string>
#include <vector>

#include "mwg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mwg::cli::dispatch(args, std::cout, std::cerr);
}
