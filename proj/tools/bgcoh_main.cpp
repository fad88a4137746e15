#include <iostream>

#include "bgcoh/commands.hpp"

int main(int argc, char** argv) { return bgcoh::run_cli(argc, argv, std::cout, std::cerr); }
