#include "histrisk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return histrisk::cli::run(argc, argv, std::cout, std::cerr);
}
