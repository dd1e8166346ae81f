#include <iostream>

#include "medoidjl/cli.hpp"

int main(int argc, char** argv) { return medoidjl::run_cli(argc, argv, std::cout, std::cerr); }
