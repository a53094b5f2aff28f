#include <iostream>

#include "hetprop/cli.hpp"

int main(int argc, char** argv) { return hetprop::run_cli(argc, argv, std::cout, std::cerr); }
