#include "conflict/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return conflict::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
