#include <iostream>

#include "purex_cli/cli.hpp"

int main(int argc, char** argv) { return purex::cli_main(argc, argv, std::cout, std::cerr); }
