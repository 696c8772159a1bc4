#include <iostream>

#include "circmotion/cli.hpp"

int main(int argc, char** argv) { return circmotion::run_cli(argc, argv, std::cout, std::cerr); }
