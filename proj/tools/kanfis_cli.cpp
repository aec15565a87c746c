#include <iostream>

#include "kanfis/cli.hpp"

int main(int argc, char** argv) { return kanfis::run_cli(argc, argv, std::cout, std::cerr); }
