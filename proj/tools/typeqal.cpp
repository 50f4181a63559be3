#include <iostream>

#include "typeqal/cli.hpp"

int main(int argc, char** argv) { return typeqal::run_cli(argc, argv, std::cout, std::cerr); }
