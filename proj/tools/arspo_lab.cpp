#include <iostream>

#include "arspo/cli.hpp"

int main(int argc, char** argv) { return arspo::run_cli(argc, argv, std::cout, std::cerr); }
