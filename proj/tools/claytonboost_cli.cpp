#include <iostream>

#include "claytonboost/commands.hpp"

int main(int argc, char** argv) {
  return claytonboost::RunCli(argc, argv, std::cout, std::cerr);
}
