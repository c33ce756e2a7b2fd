#include "nsw/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nsw::cli::run(argc, argv, std::cout, std::cerr); }
