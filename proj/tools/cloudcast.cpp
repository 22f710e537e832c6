#include <iostream>

#include "cloudcast/cli.hpp"

int main(int argc, char** argv) { return cloudcast::run_cli(argc, argv, std::cout, std::cerr); }
