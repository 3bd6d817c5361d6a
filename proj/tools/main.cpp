#include <iostream>

#include "fourphoton/cli.hpp"

int main(int argc, char** argv) { return fourphoton::cli::run(argc, argv, std::cout, std::cerr); }
