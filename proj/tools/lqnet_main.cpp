#include <iostream>

#include "lqnet/cli.hpp"

int main(int argc, char** argv) { return lqnet::cli::dispatch(argc, argv, std::cout, std::cerr); }
