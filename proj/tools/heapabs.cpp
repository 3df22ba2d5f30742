#include <iostream>

#include "heapabs/cli.hpp"

int main(int argc, char** argv) { return heapabs::run_cli(argc, argv, std::cout, std::cerr); }
