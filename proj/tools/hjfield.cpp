#include "hjfield/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return hjfield::cli::main_entry(argc, argv, std::cout, std::cerr); }
