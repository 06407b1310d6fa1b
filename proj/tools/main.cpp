#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return dynafit::cli::run(argc, argv, std::cout, std::cerr);
}
