#include <iostream>

#include "thetadet/cli.hpp"

int main(int argc, char** argv) { return thetadet::cli::run(argc, argv, std::cout, std::cerr); }
