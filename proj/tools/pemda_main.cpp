#include <iostream>

#include "pemda/cli.hpp"

int main(int argc, char** argv) { return pemda::cli_dispatch(argc, argv, std::cout, std::cerr); }
