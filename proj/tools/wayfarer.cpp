#include <iostream>

#include "wayfarer/cli.hpp"

int main(int argc, char** argv) { return wayfarer::run_cli(argc, argv, std::cout, std::cerr); }
