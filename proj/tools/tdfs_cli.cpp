#include <iostream>

#include "tdfs/cli.hpp"

int main(int argc, char** argv) { return tdfs::cli::run(argc, argv, std::cout, std::cerr); }
