#include "divest/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return divest::run_cli(argc, argv, std::cout, std::cerr);
}
