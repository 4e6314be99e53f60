#include <iostream>

#include "normcluster/cli.hpp"

int main(int argc, char** argv) { return normcluster::cli::dispatch(argc, argv, std::cout, std::cerr); }
