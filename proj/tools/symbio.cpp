#include "symbio/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return symbio::cli::run(argc, argv, std::cout, std::cerr); }
