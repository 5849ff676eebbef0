#include <iostream>

#include "bfkit/cli.hpp"

int main(int argc, char** argv) { return bfkit::run_cli(argc, argv, std::cout, std::cerr); }
